#pragma once

#include <string>

#include "geofuse/kmeans.hpp"
#include "geofuse/model.hpp"

namespace geofuse {

// k-means structure of the location embedding space over points sampled
// uniformly on the sphere (optionally restricted by a mask).
struct ClusterMap {
    std::vector<GeoPoint> points;
    std::vector<int> assignments;
    Tensor2 centroids; // k x embed dim
    double inertia = 0.0;
    int n = 0;
    int k = 0;
    std::uint64_t seed = 0;
};

// Requires a coordinate-based encoder (wrap or rff); others raise
// UnsupportedError because they define no coordinate-to-embedding map.
ClusterMap build_cluster_map(const ModelBundle& model, int n, int k, std::uint64_t seed,
                             const GeoMask* mask = nullptr);

enum class MapFormat {
    Csv,     // lat,lon,cluster
    GeoJson, // FeatureCollection of Points with a `cluster` property
    Svg,     // 1024x512 equirectangular scatter, one circle per point
};

void export_cluster_map(const ClusterMap& cm, MapFormat format, const std::string& path);

MapFormat map_format_from(const std::string& name);

// Cluster-size-weighted mean fraction of the majority domain within each
// cluster; the quantitative proxy for embedding/domain alignment.
double cluster_purity(const ClusterMap& cm, const DomainGeometry& geometry);

} // namespace geofuse
