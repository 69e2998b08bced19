#include "geofuse/cluster_map.hpp"

#include <fstream>

#include "csv_util.hpp"
#include "geofuse/errors.hpp"

namespace geofuse {

namespace {

// 28 visually distinct fills, reused cyclically for larger k.
const char* kPalette[28] = {
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0",
    "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff", "#9a6324", "#fffac8",
    "#800000", "#aaffc3", "#808000", "#ffd8b1", "#000075", "#808080", "#1b9e77",
    "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#2b8cbe",
};

} // namespace

ClusterMap build_cluster_map(const ModelBundle& model, int n, int k, std::uint64_t seed,
                             const GeoMask* mask) {
    if (!model.encoder || !coordinate_based(model.encoder->kind)) {
        throw UnsupportedError(
            "cluster maps need a coordinate-based location encoder (wrap or rff)");
    }
    if (k < 1 || n < k) {
        throw ValidationError("cluster map needs n >= k >= 1");
    }
    ClusterMap cm;
    cm.n = n;
    cm.k = k;
    cm.seed = seed;
    cm.points = sample_sphere_locations(n, seed, mask);

    Tensor2 embeddings(n, model.encoder->out_dim);
    for (int i = 0; i < n; ++i) {
        EncoderInput in;
        in.point = cm.points[static_cast<std::size_t>(i)];
        const Tensor2 emb = encode_location_value(*model.encoder, model.params, in);
        for (int j = 0; j < emb.rows; ++j) {
            embeddings.at(i, j) = emb.data[static_cast<std::size_t>(j)];
        }
    }
    KmeansResult km = kmeans_fit(embeddings, k, seed);
    cm.assignments = std::move(km.assignments);
    cm.centroids = std::move(km.centroids);
    cm.inertia = km.inertia;
    return cm;
}

void export_cluster_map(const ClusterMap& cm, MapFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError("cannot write cluster map: " + path);
    }
    switch (format) {
    case MapFormat::Csv: {
        out << "lat,lon,cluster\n";
        for (std::size_t i = 0; i < cm.points.size(); ++i) {
            out << csv::format_double(cm.points[i].lat) << ','
                << csv::format_double(cm.points[i].lon) << ',' << cm.assignments[i] << '\n';
        }
        break;
    }
    case MapFormat::GeoJson: {
        out << "{\"type\":\"FeatureCollection\",\"features\":[";
        for (std::size_t i = 0; i < cm.points.size(); ++i) {
            if (i > 0) {
                out << ',';
            }
            out << "{\"type\":\"Feature\",\"geometry\":{\"type\":\"Point\",\"coordinates\":["
                << csv::format_double(cm.points[i].lon) << ','
                << csv::format_double(cm.points[i].lat) << "]},\"properties\":{\"cluster\":"
                << cm.assignments[i] << "}}";
        }
        out << "]}\n";
        break;
    }
    case MapFormat::Svg: {
        constexpr int w = 1024;
        constexpr int h = 512;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
            << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
        out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
        for (std::size_t i = 0; i < cm.points.size(); ++i) {
            const double x = (cm.points[i].lon + 180.0) / 360.0 * w;
            const double y = (90.0 - cm.points[i].lat) / 180.0 * h;
            const char* fill = kPalette[static_cast<std::size_t>(cm.assignments[i]) % 28];
            out << "<circle cx=\"" << csv::format_double(x) << "\" cy=\"" << csv::format_double(y)
                << "\" r=\"2\" fill=\"" << fill << "\"/>\n";
        }
        out << "</svg>\n";
        break;
    }
    }
    if (!out) {
        throw DataError("failed while writing cluster map: " + path);
    }
}

MapFormat map_format_from(const std::string& name) {
    if (name == "csv") {
        return MapFormat::Csv;
    }
    if (name == "geojson") {
        return MapFormat::GeoJson;
    }
    if (name == "svg") {
        return MapFormat::Svg;
    }
    throw ConfigError("unknown map format: " + name);
}

double cluster_purity(const ClusterMap& cm, const DomainGeometry& geometry) {
    if (cm.points.empty()) {
        throw ValidationError("cluster map has no points");
    }
    // counts[cluster][domain]
    std::vector<std::vector<int>> counts(
        static_cast<std::size_t>(cm.k),
        std::vector<int>(static_cast<std::size_t>(geometry.num_domains), 0));
    for (std::size_t i = 0; i < cm.points.size(); ++i) {
        const int d = geometry.domain_of(cm.points[i]);
        ++counts[static_cast<std::size_t>(cm.assignments[i])][static_cast<std::size_t>(d)];
    }
    long majority_total = 0;
    for (const auto& row : counts) {
        int best = 0;
        for (int c : row) {
            best = std::max(best, c);
        }
        majority_total += best;
    }
    return static_cast<double>(majority_total) / static_cast<double>(cm.points.size());
}

} // namespace geofuse
