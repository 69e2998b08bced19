#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "geofuse/data.hpp"
#include "geofuse/errors.hpp"

using namespace geofuse;
namespace fs = std::filesystem;

namespace {

SynthConfig small_cfg() {
    SynthConfig cfg;
    cfg.num_domains = 3;
    cfg.num_classes = 4;
    cfg.feature_dim = 6;
    cfg.n_train = 120;
    cfg.n_val = 40;
    cfg.n_test = 40;
    cfg.seed = 11;
    return cfg;
}

bool records_equal(const Record& a, const Record& b) {
    return a.key == b.key && a.features == b.features && a.target == b.target &&
           a.point.lat == b.point.lat && a.point.lon == b.point.lon && a.domain == b.domain;
}

bool bundles_equal(const DatasetBundle& a, const DatasetBundle& b) {
    if (a.train.size() != b.train.size() || a.val.size() != b.val.size() ||
        a.test.size() != b.test.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        if (!records_equal(a.train[i], b.train[i])) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.val.size(); ++i) {
        if (!records_equal(a.val[i], b.val[i])) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.test.size(); ++i) {
        if (!records_equal(a.test[i], b.test[i])) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("degenerate mixture puts every train record in domain 0") {
    SynthConfig cfg = small_cfg();
    cfg.train_mixture = {1.0, 0.0, 0.0};
    const DatasetBundle b = generate_synthetic(cfg);
    for (const Record& r : b.train) {
        CHECK(r.domain == 0);
    }
}

TEST_CASE("record counts and domain ranges match the config") {
    const DatasetBundle b = generate_synthetic(small_cfg());
    CHECK(b.train.size() == 120);
    CHECK(b.val.size() == 40);
    CHECK(b.test.size() == 40);
    CHECK(b.num_domains == 3);
    CHECK(b.num_classes == 4);
    for (const Record& r : b.train) {
        CHECK(r.domain >= 0);
        CHECK(r.domain < 3);
        CHECK(static_cast<int>(r.target) < 4);
    }
}

TEST_CASE("same seed generates identical bundles") {
    const DatasetBundle a = generate_synthetic(small_cfg());
    const DatasetBundle b = generate_synthetic(small_cfg());
    CHECK(bundles_equal(a, b));
    SynthConfig other = small_cfg();
    other.seed = 12;
    CHECK(!bundles_equal(a, generate_synthetic(other)));
}

TEST_CASE("off-simplex mixtures are rejected") {
    SynthConfig cfg = small_cfg();
    cfg.train_mixture = {0.5, 0.4, 0.2};
    CHECK_THROWS_AS(generate_synthetic(cfg), ValidationError);
    cfg.train_mixture = {1.2, -0.2, 0.0};
    CHECK_THROWS_AS(generate_synthetic(cfg), ValidationError);
    cfg.train_mixture = {0.5, 0.5};
    CHECK_THROWS_AS(generate_synthetic(cfg), ValidationError);
}

TEST_CASE("train domain frequencies converge to the mixture") {
    SynthConfig cfg;
    cfg.num_domains = 6;
    cfg.num_classes = 4;
    cfg.feature_dim = 4;
    cfg.n_train = 10000;
    cfg.n_val = 10;
    cfg.n_test = 10;
    cfg.seed = 3;
    const DatasetBundle b = generate_synthetic(cfg);
    const std::vector<double> mix = default_train_mixture(6);
    std::vector<int> counts(6, 0);
    for (const Record& r : b.train) {
        ++counts[static_cast<std::size_t>(r.domain)];
    }
    for (int d = 0; d < 6; ++d) {
        const double p = mix[static_cast<std::size_t>(d)];
        const double freq = counts[static_cast<std::size_t>(d)] / 10000.0;
        const double tol = 3.0 * std::sqrt(p * (1.0 - p) / 10000.0);
        CHECK(std::fabs(freq - p) < tol);
    }
}

TEST_CASE("domain regions partition the sphere: assignment round-trips") {
    for (const GeometryKind kind :
         {GeometryKind::LatitudinalBands, GeometryKind::SphericalVoronoi}) {
        SynthConfig cfg = small_cfg();
        cfg.geometry = kind;
        const DatasetBundle b = generate_synthetic(cfg);
        for (const Record& r : b.train) {
            CHECK(b.geometry->domain_of(r.point) == r.domain);
        }
        for (const Record& r : b.test) {
            CHECK(b.geometry->domain_of(r.point) == r.domain);
        }
    }
}

TEST_CASE("clean features depend only on class: nearest prototype is perfect") {
    SynthConfig cfg = small_cfg();
    cfg.spurious_strength = 0.0;
    cfg.noise_sigma = 0.0;
    const DatasetBundle b = generate_synthetic(cfg);
    // Collect the distinct feature vectors per class from train, then check
    // every split record matches its class's prototype exactly.
    std::vector<std::vector<double>> proto(static_cast<std::size_t>(b.num_classes));
    for (const Record& r : b.train) {
        proto[static_cast<std::size_t>(static_cast<int>(r.target))] = r.features;
    }
    const auto check_split = [&](const std::vector<Record>& recs) {
        for (const Record& r : recs) {
            const auto& expect = proto[static_cast<std::size_t>(static_cast<int>(r.target))];
            if (expect.empty()) {
                continue; // class absent from train
            }
            CHECK(r.features == expect);
        }
    };
    check_split(b.train);
    check_split(b.val);
    check_split(b.test);
}

TEST_CASE("csv round trip is the identity on bundles") {
    const DatasetBundle a = generate_synthetic(small_cfg());
    const fs::path path = fs::temp_directory_path() / "geofuse_roundtrip.csv";
    write_dataset_csv(a, path.string());
    const DatasetBundle b = load_dataset_csv(path.string());
    CHECK(bundles_equal(a, b));
    CHECK(b.num_domains == a.num_domains);
    CHECK(b.num_classes == a.num_classes);
    CHECK(b.task == a.task);
    CHECK(b.feature_dim == a.feature_dim);
}

TEST_CASE("csv parse errors carry line numbers") {
    const fs::path path = fs::temp_directory_path() / "geofuse_badrow.csv";
    {
        std::ofstream out(path);
        out << "key,split,domain,target,lat,lon,f0,f1\n";
        out << "a,train,0,1,10,20,0.5,0.25\n";
        out << "b,train,0,1,10,20,0.5\n"; // short row
    }
    try {
        load_dataset_csv(path.string());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
    {
        std::ofstream out(path);
        out << "key,split,domain,target,lat,lon,f0\n";
        out << "a,weird,0,1,10,20,0.5\n";
    }
    try {
        load_dataset_csv(path.string());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("weird") != std::string::npos);
    }
}

TEST_CASE("two-file load joins features and labels on key") {
    const fs::path features = fs::temp_directory_path() / "geofuse_feat.csv";
    const fs::path labels = fs::temp_directory_path() / "geofuse_lab.csv";
    {
        std::ofstream out(features);
        out << "key,f0,f1\n";
        out << "r1,0.5,1.5\n";
        out << "r2,-1,2\n";
        out << "r3,0,0.25\n";
    }
    {
        std::ofstream out(labels);
        out << "key,split,domain,target,lat,lon\n";
        out << "r1,train,0,1,10,20\n";
        out << "r2,val,1,0,-5,40\n";
        out << "r3,test,1,1,17,-60\n";
    }
    const DatasetBundle b = load_dataset_csv(features.string(), labels.string());
    CHECK(b.train.size() == 1);
    CHECK(b.val.size() == 1);
    CHECK(b.test.size() == 1);
    CHECK(b.train[0].features == std::vector<double>{0.5, 1.5});
    CHECK(b.feature_dim == 2);
    CHECK(b.num_domains == 2);

    // Missing key in the features file is an error naming the key.
    {
        std::ofstream out(labels, std::ios::app);
        out << "r9,test,0,1,0,0\n";
    }
    try {
        load_dataset_csv(features.string(), labels.string());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("r9") != std::string::npos);
    }
}

TEST_CASE("sphere sampling is deterministic and area-uniform") {
    const auto one = sample_sphere_locations(1, 5);
    const auto one_again = sample_sphere_locations(1, 5);
    CHECK(one[0].lat == one_again[0].lat);
    CHECK(one[0].lon == one_again[0].lon);

    const auto pts = sample_sphere_locations(100000, 5);
    double mean_sin = 0.0;
    for (const GeoPoint& p : pts) {
        validate(p);
        mean_sin += std::sin(deg2rad(p.lat));
    }
    mean_sin /= static_cast<double>(pts.size());
    CHECK(std::fabs(mean_sin) < 0.01);
}

TEST_CASE("geojson mask restricts sampling to the polygon") {
    const fs::path path = fs::temp_directory_path() / "geofuse_mask.json";
    {
        std::ofstream out(path);
        // Northern hemisphere rectangle in lon/lat space.
        out << R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{},)"
            << R"("geometry":{"type":"Polygon","coordinates":[[[-180,0],[180,0],[180,90],[-180,90],[-180,0]]]}}]})";
    }
    const GeoMask mask = GeoMask::load_geojson(path.string());
    CHECK(mask.polygon_count() == 1);
    CHECK(mask.contains({45.0, 10.0}));
    CHECK(!mask.contains({-45.0, 10.0}));
    const auto pts = sample_sphere_locations(500, 9, &mask);
    for (const GeoPoint& p : pts) {
        CHECK(p.lat > 0.0);
    }
}

TEST_CASE("geojson mask with holes honors the even-odd rule") {
    const fs::path path = fs::temp_directory_path() / "geofuse_mask_hole.json";
    {
        std::ofstream out(path);
        out << R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{},)"
            << R"("geometry":{"type":"Polygon","coordinates":[)"
            << R"([[-40,-40],[40,-40],[40,40],[-40,40],[-40,-40]],)"
            << R"([[-10,-10],[10,-10],[10,10],[-10,10],[-10,-10]]]}}]})";
    }
    const GeoMask mask = GeoMask::load_geojson(path.string());
    CHECK(mask.contains({30.0, 30.0}));
    CHECK(!mask.contains({0.0, 0.0})); // inside the hole
}

TEST_CASE("regression targets carry a domain-dependent signal") {
    SynthConfig cfg = small_cfg();
    cfg.task = TaskKind::Regression;
    cfg.n_train = 400;
    const DatasetBundle b = generate_synthetic(cfg);
    CHECK(b.task == TaskKind::Regression);
    CHECK(b.num_classes == 0);
    // Domain means should differ (domain bias is part of the target).
    std::vector<double> sum(3, 0.0);
    std::vector<int> cnt(3, 0);
    for (const Record& r : b.train) {
        sum[static_cast<std::size_t>(r.domain)] += r.target;
        ++cnt[static_cast<std::size_t>(r.domain)];
    }
    double lo = 1e300;
    double hi = -1e300;
    for (int d = 0; d < 3; ++d) {
        if (cnt[static_cast<std::size_t>(d)] > 5) {
            const double m = sum[static_cast<std::size_t>(d)] / cnt[static_cast<std::size_t>(d)];
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
    }
    CHECK(hi - lo > 0.1);
}
