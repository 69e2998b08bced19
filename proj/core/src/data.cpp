#include "geofuse/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv_util.hpp"
#include "geofuse/errors.hpp"
#include "geofuse/locenc.hpp"

namespace geofuse {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRad2Deg = 180.0 / kPi;

// Keeps band samples strictly interior so sin/asin round trips can never
// cross a boundary.
constexpr double kBandMargin = 1e-9;

GeoPoint uniform_sphere_point(Rng& rng) {
    const double lon = rng.uniform(-180.0, 180.0);
    const double lat = std::asin(2.0 * rng.uniform01() - 1.0) * kRad2Deg;
    return {lat, lon};
}

double great_circle_cos(const GeoPoint& a, const GeoPoint& b) {
    const double la = deg2rad(a.lat);
    const double lb = deg2rad(b.lat);
    return std::sin(la) * std::sin(lb) +
           std::cos(la) * std::cos(lb) * std::cos(deg2rad(a.lon) - deg2rad(b.lon));
}

int categorical(std::span<const double> probs, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) {
            return static_cast<int>(i);
        }
    }
    return static_cast<int>(probs.size()) - 1;
}

void validate_mixture(std::span<const double> mix, int k, const char* name) {
    if (static_cast<int>(mix.size()) != k) {
        throw ValidationError(std::string(name) + " must have one entry per domain");
    }
    double sum = 0.0;
    for (double p : mix) {
        if (!(p >= 0.0)) {
            throw ValidationError(std::string(name) + " has a negative entry");
        }
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw ValidationError(std::string(name) + " must sum to 1, got " + std::to_string(sum));
    }
}

} // namespace

int DomainGeometry::domain_of(const GeoPoint& p) const {
    validate(p);
    if (kind == GeometryKind::LatitudinalBands) {
        const double s = std::sin(deg2rad(p.lat));
        int idx = static_cast<int>(std::floor((s + 1.0) / 2.0 * num_domains));
        if (idx < 0) {
            idx = 0;
        }
        if (idx >= num_domains) {
            idx = num_domains - 1;
        }
        return idx;
    }
    int best = 0;
    double best_cos = great_circle_cos(p, seeds[0]);
    for (int d = 1; d < num_domains; ++d) {
        const double c = great_circle_cos(p, seeds[static_cast<std::size_t>(d)]);
        if (c > best_cos) {
            best_cos = c;
            best = d;
        }
    }
    return best;
}

GeoPoint DomainGeometry::sample_in(int domain, Rng& rng) const {
    if (domain < 0 || domain >= num_domains) {
        throw ValidationError("domain " + std::to_string(domain) + " out of range");
    }
    if (kind == GeometryKind::LatitudinalBands) {
        const double lo = -1.0 + 2.0 * domain / num_domains;
        const double hi = -1.0 + 2.0 * (domain + 1) / num_domains;
        const double lon = rng.uniform(-180.0, 180.0);
        const double s =
            lo + (hi - lo) * (kBandMargin + (1.0 - 2.0 * kBandMargin) * rng.uniform01());
        return {std::asin(s) * kRad2Deg, lon};
    }
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        const GeoPoint p = uniform_sphere_point(rng);
        if (domain_of(p) == domain) {
            return p;
        }
    }
    throw ValidationError("could not sample a point inside domain " + std::to_string(domain));
}

DomainGeometry make_geometry(GeometryKind kind, int num_domains, std::uint64_t seed) {
    if (num_domains < 2) {
        throw ValidationError("domain geometry requires at least 2 domains");
    }
    DomainGeometry g;
    g.kind = kind;
    g.num_domains = num_domains;
    if (kind == GeometryKind::SphericalVoronoi) {
        Rng rng(mix_seed(seed, "geometry"));
        g.seeds.reserve(static_cast<std::size_t>(num_domains));
        for (int d = 0; d < num_domains; ++d) {
            g.seeds.push_back(uniform_sphere_point(rng));
        }
    }
    return g;
}

std::vector<double> default_train_mixture(int num_domains) {
    if (num_domains == 6) {
        return {0.40, 0.30, 0.15, 0.10, 0.04, 0.01};
    }
    std::vector<double> mix(static_cast<std::size_t>(num_domains));
    double sum = 0.0;
    for (int d = 0; d < num_domains; ++d) {
        mix[static_cast<std::size_t>(d)] = std::pow(0.5, d);
        sum += mix[static_cast<std::size_t>(d)];
    }
    for (auto& p : mix) {
        p /= sum;
    }
    return mix;
}

DatasetBundle generate_synthetic(const SynthConfig& cfg) {
    if (cfg.num_domains < 2) {
        throw ValidationError("num_domains must be >= 2");
    }
    if (cfg.task == TaskKind::Classification && cfg.num_classes < 2) {
        throw ValidationError("num_classes must be >= 2 for classification");
    }
    if (cfg.feature_dim < 1) {
        throw ValidationError("feature_dim must be >= 1");
    }
    if (cfg.noise_sigma < 0.0 || cfg.spurious_strength < 0.0) {
        throw ValidationError("noise_sigma and spurious_strength must be non-negative");
    }
    const int k = cfg.num_domains;
    // Latent prototypes shape the features for regression too.
    const int classes = std::max(cfg.num_classes, 2);

    std::vector<double> train_mix =
        cfg.train_mixture.empty() ? default_train_mixture(k) : cfg.train_mixture;
    std::vector<double> test_mix = cfg.test_mixture;
    if (test_mix.empty()) {
        test_mix.assign(static_cast<std::size_t>(k), 1.0 / k);
    }
    validate_mixture(train_mix, k, "train_mixture");
    validate_mixture(test_mix, k, "test_mixture");

    DatasetBundle bundle;
    bundle.num_domains = k;
    bundle.num_classes = cfg.task == TaskKind::Classification ? classes : 0;
    bundle.feature_dim = cfg.feature_dim;
    bundle.task = cfg.task;
    bundle.geometry = make_geometry(cfg.geometry, k, cfg.seed);

    // Class prototypes: unit vectors.
    Rng proto_rng(mix_seed(cfg.seed, "prototypes"));
    std::vector<std::vector<double>> protos(static_cast<std::size_t>(classes));
    for (auto& p : protos) {
        p.resize(static_cast<std::size_t>(cfg.feature_dim));
        double norm2 = 0.0;
        for (auto& x : p) {
            x = proto_rng.normal();
            norm2 += x * x;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : p) {
            x *= inv;
        }
    }

    // Domain offsets point along a per-domain confusion class prototype, so
    // ignoring the domain costs accuracy.
    Rng conf_rng(mix_seed(cfg.seed, "confusion"));
    std::vector<int> confusion(static_cast<std::size_t>(k));
    for (auto& c : confusion) {
        c = static_cast<int>(conf_rng.below(static_cast<std::uint64_t>(classes)));
    }

    // Per-domain class priors.
    Rng prior_rng(mix_seed(cfg.seed, "priors"));
    std::vector<std::vector<double>> priors(static_cast<std::size_t>(k));
    for (auto& p : priors) {
        p = prior_rng.dirichlet(0.5, classes);
    }

    // Regression readout and per-domain biases.
    Rng reg_rng(mix_seed(cfg.seed, "regression"));
    std::vector<double> readout(static_cast<std::size_t>(cfg.feature_dim));
    {
        double norm2 = 0.0;
        for (auto& x : readout) {
            x = reg_rng.normal();
            norm2 += x * x;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : readout) {
            x *= inv;
        }
    }
    std::vector<double> domain_bias(static_cast<std::size_t>(k));
    for (auto& b : domain_bias) {
        b = cfg.spurious_strength * reg_rng.normal();
    }

    const auto gen_split = [&](int n, std::span<const double> mix, const char* tag,
                               std::uint64_t stream) {
        std::vector<Record> out;
        out.reserve(static_cast<std::size_t>(n));
        Rng rng(mix_seed(cfg.seed, "records", stream));
        for (int i = 0; i < n; ++i) {
            Record rec;
            rec.domain = categorical(mix, rng);
            rec.point = bundle.geometry->sample_in(rec.domain, rng);
            const int cls = categorical(priors[static_cast<std::size_t>(rec.domain)], rng);
            rec.features.resize(static_cast<std::size_t>(cfg.feature_dim));
            const auto& proto = protos[static_cast<std::size_t>(cls)];
            const auto& off =
                protos[static_cast<std::size_t>(confusion[static_cast<std::size_t>(rec.domain)])];
            for (int j = 0; j < cfg.feature_dim; ++j) {
                rec.features[static_cast<std::size_t>(j)] =
                    proto[static_cast<std::size_t>(j)] +
                    cfg.spurious_strength * off[static_cast<std::size_t>(j)] +
                    cfg.noise_sigma * rng.normal();
            }
            if (cfg.task == TaskKind::Classification) {
                rec.target = static_cast<double>(cls);
            } else {
                double t = 0.0;
                for (int j = 0; j < cfg.feature_dim; ++j) {
                    t += readout[static_cast<std::size_t>(j)] * proto[static_cast<std::size_t>(j)];
                }
                rec.target = t + domain_bias[static_cast<std::size_t>(rec.domain)] +
                             cfg.noise_sigma * rng.normal();
            }
            std::ostringstream key;
            key << tag << "-" << i;
            rec.key = key.str();
            out.push_back(std::move(rec));
        }
        return out;
    };

    bundle.train = gen_split(cfg.n_train, train_mix, "train", 0);
    bundle.val = gen_split(cfg.n_val, test_mix, "val", 1);
    bundle.test = gen_split(cfg.n_test, test_mix, "test", 2);
    return bundle;
}

// ---- CSV ----

namespace {

const char* split_tag(int s) { return s == 0 ? "train" : (s == 1 ? "val" : "test"); }

void write_records(std::ostream& out, std::span<const Record> recs, const char* tag) {
    for (const Record& r : recs) {
        out << r.key << ',' << tag << ',' << r.domain << ',' << csv::format_double(r.target)
            << ',' << csv::format_double(r.point.lat) << ',' << csv::format_double(r.point.lon);
        for (double f : r.features) {
            out << ',' << csv::format_double(f);
        }
        out << '\n';
    }
}

int parse_split_tag(std::string_view tag, const std::string& file, int line_no) {
    if (tag == "train") {
        return 0;
    }
    if (tag == "val") {
        return 1;
    }
    if (tag == "test") {
        return 2;
    }
    throw DataError(file + ":" + std::to_string(line_no) + ": unknown split tag '" +
                    std::string(tag) + "'");
}

void finalize_bundle(DatasetBundle& bundle, std::optional<TaskKind> task_override) {
    int max_domain = -1;
    bool integral = true;
    double max_target = 0.0;
    const auto scan = [&](const std::vector<Record>& recs) {
        for (const Record& r : recs) {
            max_domain = std::max(max_domain, r.domain);
            if (r.target < 0.0 || r.target != std::floor(r.target)) {
                integral = false;
            }
            max_target = std::max(max_target, r.target);
        }
    };
    scan(bundle.train);
    scan(bundle.val);
    scan(bundle.test);
    bundle.num_domains = max_domain + 1;
    // Task inference: integer-valued non-negative targets mean classification
    // unless the caller says otherwise.
    bundle.task =
        task_override.value_or(integral ? TaskKind::Classification : TaskKind::Regression);
    bundle.num_classes =
        bundle.task == TaskKind::Classification ? static_cast<int>(max_target) + 1 : 0;
    if (bundle.task == TaskKind::Classification && bundle.num_classes < 2) {
        throw DataError("classification dataset needs at least 2 classes");
    }
}

} // namespace

void write_dataset_csv(const DatasetBundle& bundle, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write dataset CSV: " + path);
    }
    out << "key,split,domain,target,lat,lon";
    for (int j = 0; j < bundle.feature_dim; ++j) {
        out << ",f" << j;
    }
    out << '\n';
    write_records(out, bundle.train, split_tag(0));
    write_records(out, bundle.val, split_tag(1));
    write_records(out, bundle.test, split_tag(2));
    if (!out) {
        throw DataError("failed while writing dataset CSV: " + path);
    }
}

DatasetBundle load_dataset_csv(std::span<const std::string> paths) {
    if (paths.empty()) {
        throw DataError("no dataset CSV paths given");
    }
    DatasetBundle bundle;
    int feature_dim = -1;
    for (const std::string& path : paths) {
        std::ifstream in(path);
        if (!in) {
            throw DataError("cannot open dataset CSV: " + path);
        }
        std::string line;
        int line_no = 0;
        bool header_seen = false;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string_view sv = csv::strip_cr(line);
            if (sv.empty()) {
                continue;
            }
            const auto fields = csv::split(sv);
            if (!header_seen) {
                if (fields.size() < 7 || fields[0] != "key" || fields[1] != "split" ||
                    fields[2] != "domain" || fields[3] != "target" || fields[4] != "lat" ||
                    fields[5] != "lon") {
                    throw DataError(path +
                                    ":1: expected header key,split,domain,target,lat,lon,f0,...");
                }
                const int dim = static_cast<int>(fields.size()) - 6;
                if (feature_dim < 0) {
                    feature_dim = dim;
                } else if (feature_dim != dim) {
                    throw DataError(path + ":1: feature dim " + std::to_string(dim) +
                                    " differs from earlier files (" +
                                    std::to_string(feature_dim) + ")");
                }
                header_seen = true;
                continue;
            }
            if (static_cast<int>(fields.size()) != feature_dim + 6) {
                throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                                std::to_string(feature_dim + 6) + " fields, got " +
                                std::to_string(fields.size()));
            }
            Record rec;
            rec.key = std::string(fields[0]);
            const int split = parse_split_tag(fields[1], path, line_no);
            rec.domain = static_cast<int>(csv::parse_long(fields[2], path, line_no));
            rec.target = csv::parse_double(fields[3], path, line_no);
            rec.point.lat = csv::parse_double(fields[4], path, line_no);
            rec.point.lon = csv::parse_double(fields[5], path, line_no);
            try {
                validate(rec.point);
            } catch (const ValidationError& e) {
                throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
            }
            if (rec.domain < 0) {
                throw DataError(path + ":" + std::to_string(line_no) + ": negative domain id");
            }
            rec.features.resize(static_cast<std::size_t>(feature_dim));
            for (int j = 0; j < feature_dim; ++j) {
                rec.features[static_cast<std::size_t>(j)] =
                    csv::parse_double(fields[static_cast<std::size_t>(j) + 6], path, line_no);
            }
            auto& dst = split == 0 ? bundle.train : (split == 1 ? bundle.val : bundle.test);
            dst.push_back(std::move(rec));
        }
        if (!header_seen) {
            throw DataError(path + ": empty file");
        }
    }
    bundle.feature_dim = std::max(feature_dim, 0);
    finalize_bundle(bundle, std::nullopt);
    return bundle;
}

DatasetBundle load_dataset_csv(const std::string& path) {
    const std::string paths[] = {path};
    return load_dataset_csv(std::span<const std::string>(paths, 1));
}

DatasetBundle load_dataset_csv(const std::string& features_path,
                               const std::string& labels_path) {
    // The features file reuses the frozen-table schema: key,f0..f{D-1}.
    FrozenTable features = FrozenTable::load_csv(features_path);
    std::ifstream in(labels_path);
    if (!in) {
        throw DataError("cannot open labels CSV: " + labels_path);
    }
    DatasetBundle bundle;
    bundle.feature_dim = features.dim();
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    std::size_t joined = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = csv::strip_cr(line);
        if (sv.empty()) {
            continue;
        }
        const auto fields = csv::split(sv);
        if (!header_seen) {
            if (fields.size() != 6 || fields[0] != "key" || fields[1] != "split" ||
                fields[2] != "domain" || fields[3] != "target" || fields[4] != "lat" ||
                fields[5] != "lon") {
                throw DataError(labels_path +
                                ":1: expected header key,split,domain,target,lat,lon");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 6) {
            throw DataError(labels_path + ":" + std::to_string(line_no) +
                            ": expected 6 fields, got " + std::to_string(fields.size()));
        }
        Record rec;
        rec.key = std::string(fields[0]);
        const int split = parse_split_tag(fields[1], labels_path, line_no);
        rec.domain = static_cast<int>(csv::parse_long(fields[2], labels_path, line_no));
        rec.target = csv::parse_double(fields[3], labels_path, line_no);
        rec.point.lat = csv::parse_double(fields[4], labels_path, line_no);
        rec.point.lon = csv::parse_double(fields[5], labels_path, line_no);
        try {
            validate(rec.point);
        } catch (const ValidationError& e) {
            throw DataError(labels_path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        const Tensor2* vec = nullptr;
        try {
            vec = &features.lookup(rec.key);
        } catch (const DataError&) {
            throw DataError(labels_path + ":" + std::to_string(line_no) + ": key '" + rec.key +
                            "' missing from " + features_path);
        }
        rec.features.assign(vec->data.begin(), vec->data.end());
        ++joined;
        auto& dst = split == 0 ? bundle.train : (split == 1 ? bundle.val : bundle.test);
        dst.push_back(std::move(rec));
    }
    if (!header_seen) {
        throw DataError(labels_path + ": empty file");
    }
    if (joined != features.size()) {
        throw DataError(features_path + ": " + std::to_string(features.size() - joined) +
                        " feature rows have no matching labels row");
    }
    finalize_bundle(bundle, std::nullopt);
    return bundle;
}

// ---- GeoJSON mask ----

GeoMask GeoMask::load_geojson(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open GeoJSON mask: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": invalid JSON: " + std::string(e.what()));
    }
    if (doc.value("type", "") != "FeatureCollection") {
        throw DataError(path + ": expected a FeatureCollection");
    }
    GeoMask mask;
    const auto parse_ring = [&](const nlohmann::json& jring) {
        Ring ring;
        for (const auto& coord : jring) {
            if (!coord.is_array() || coord.size() < 2) {
                throw DataError(path + ": malformed coordinate");
            }
            // GeoJSON coordinate order is [lon, lat].
            ring.push_back(GeoPoint{coord[1].get<double>(), coord[0].get<double>()});
        }
        return ring;
    };
    const auto parse_polygon = [&](const nlohmann::json& jpoly) {
        Polygon poly;
        for (const auto& jring : jpoly) {
            poly.push_back(parse_ring(jring));
        }
        return poly;
    };
    for (const auto& feature : doc.value("features", nlohmann::json::array())) {
        const auto& geom = feature.at("geometry");
        const std::string type = geom.value("type", "");
        if (type == "Polygon") {
            mask.polygons_.push_back(parse_polygon(geom.at("coordinates")));
        } else if (type == "MultiPolygon") {
            for (const auto& jpoly : geom.at("coordinates")) {
                mask.polygons_.push_back(parse_polygon(jpoly));
            }
        } else {
            throw DataError(path + ": unsupported geometry type '" + type + "'");
        }
    }
    if (mask.polygons_.empty()) {
        throw DataError(path + ": mask contains no polygons");
    }
    return mask;
}

bool GeoMask::contains(const GeoPoint& p) const {
    for (const Polygon& poly : polygons_) {
        int crossings = 0;
        for (const Ring& ring : poly) {
            const std::size_t n = ring.size();
            if (n < 3) {
                continue;
            }
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                const double xi = ring[i].lon;
                const double yi = ring[i].lat;
                const double xj = ring[j].lon;
                const double yj = ring[j].lat;
                if ((yi > p.lat) != (yj > p.lat) &&
                    p.lon < (xj - xi) * (p.lat - yi) / (yj - yi) + xi) {
                    ++crossings;
                }
            }
        }
        if (crossings % 2 == 1) {
            return true;
        }
    }
    return false;
}

std::vector<GeoPoint> sample_sphere_locations(int n, std::uint64_t seed, const GeoMask* mask) {
    if (n < 1) {
        throw ValidationError("sample count must be >= 1");
    }
    Rng rng(mix_seed(seed, "sphere"));
    std::vector<GeoPoint> out;
    out.reserve(static_cast<std::size_t>(n));
    const std::uint64_t budget = 1000000ULL * static_cast<std::uint64_t>(n);
    std::uint64_t draws = 0;
    while (out.size() < static_cast<std::size_t>(n)) {
        const GeoPoint p = uniform_sphere_point(rng);
        ++draws;
        if (mask == nullptr || mask->contains(p)) {
            out.push_back(p);
        } else if (draws >= budget) {
            throw DataError("mask rejected all samples; is its area zero?");
        }
    }
    return out;
}

const char* task_kind_name(TaskKind kind) {
    return kind == TaskKind::Classification ? "classification" : "regression";
}

TaskKind task_kind_from(const std::string& name) {
    if (name == "classification") {
        return TaskKind::Classification;
    }
    if (name == "regression") {
        return TaskKind::Regression;
    }
    throw ConfigError("unknown task kind: " + name);
}

const char* geometry_kind_name(GeometryKind kind) {
    return kind == GeometryKind::LatitudinalBands ? "latitudinal_bands" : "spherical_voronoi";
}

GeometryKind geometry_kind_from(const std::string& name) {
    if (name == "latitudinal_bands") {
        return GeometryKind::LatitudinalBands;
    }
    if (name == "spherical_voronoi") {
        return GeometryKind::SphericalVoronoi;
    }
    throw ConfigError("unknown geometry kind: " + name);
}

} // namespace geofuse
