#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geofuse/geo.hpp"
#include "geofuse/rng.hpp"

namespace geofuse {

enum class TaskKind {
    Classification,
    Regression,
};

enum class GeometryKind {
    LatitudinalBands,
    SphericalVoronoi,
};

// One example: precomputed feature vector, target, coordinate, domain label.
struct Record {
    std::string key;
    std::vector<double> features;
    double target = 0.0; // class index (as integer value) or regression scalar
    GeoPoint point{};
    int domain = -1;
};

// Partition of the sphere into domain regions. Bands split sin(lat) into
// equal-area slices; Voronoi assigns by great-circle distance to seeded
// centroids (lowest index wins ties).
struct DomainGeometry {
    GeometryKind kind = GeometryKind::LatitudinalBands;
    int num_domains = 0;
    std::vector<GeoPoint> seeds; // Voronoi only

    int domain_of(const GeoPoint& p) const;
    GeoPoint sample_in(int domain, Rng& rng) const; // area-uniform within the region
};

DomainGeometry make_geometry(GeometryKind kind, int num_domains, std::uint64_t seed);

struct SynthConfig {
    int num_domains = 6;
    int num_classes = 6;
    int feature_dim = 64;
    GeometryKind geometry = GeometryKind::LatitudinalBands;
    double spurious_strength = 1.0;
    double noise_sigma = 0.4;
    // Empty mixtures mean the defaults: skewed train, uniform test.
    std::vector<double> train_mixture;
    std::vector<double> test_mixture;
    int n_train = 10000;
    int n_val = 2000;
    int n_test = 2000;
    TaskKind task = TaskKind::Classification;
    std::uint64_t seed = 0;
};

// Default skewed train mixture for K domains: heavy head, rare tail.
std::vector<double> default_train_mixture(int num_domains);

struct DatasetBundle {
    std::vector<Record> train;
    std::vector<Record> val;
    std::vector<Record> test;
    int num_domains = 0;
    int num_classes = 0; // 0 for regression
    int feature_dim = 0;
    TaskKind task = TaskKind::Classification;
    std::optional<DomainGeometry> geometry; // synthetic datasets only
};

// Synthetic geo-tagged data with controllable subpopulation shift:
//  - domain sampled from the split mixture (val uses the test mixture,
//    mirroring a held-out shifted validation split)
//  - location sampled area-uniformly inside the domain's region
//  - class sampled from a per-domain Dirichlet(0.5) prior
//  - features = class prototype + spurious_strength * domain offset + noise,
//    where each domain's offset is the prototype of a domain-specific
//    confusion class, so feature-only models are pulled across class
//    boundaries while location-aware models can undo the shift
//  - regression targets = linear readout of the class prototype + a
//    domain-dependent bias + noise
DatasetBundle generate_synthetic(const SynthConfig& cfg);

// Combined CSV schema: key,split,domain,target,lat,lon,f0..f{D-1}.
void write_dataset_csv(const DatasetBundle& bundle, const std::string& path);
DatasetBundle load_dataset_csv(std::span<const std::string> paths);
DatasetBundle load_dataset_csv(const std::string& path);

// Two-file form: features CSV `key,f0..f{D-1}` joined on key with a labels
// CSV `key,split,domain,target,lat,lon`.
DatasetBundle load_dataset_csv(const std::string& features_path,
                               const std::string& labels_path);

// Union of polygons loaded from a GeoJSON FeatureCollection (WGS84 degrees).
// A point is inside the mask when it is inside any polygon; each polygon is
// tested with the even-odd rule over its rings, so holes are honored.
class GeoMask {
  public:
    using Ring = std::vector<GeoPoint>;
    using Polygon = std::vector<Ring>;

    static GeoMask load_geojson(const std::string& path);
    bool contains(const GeoPoint& p) const;
    std::size_t polygon_count() const { return polygons_.size(); }

  private:
    std::vector<Polygon> polygons_;
};

// Area-uniform points on the sphere: lon ~ Uniform[-180, 180), lat =
// asin(2u - 1). With a mask, rejection-samples until inside; raises DataError
// after 1e6 * n failed draws.
std::vector<GeoPoint> sample_sphere_locations(int n, std::uint64_t seed,
                                              const GeoMask* mask = nullptr);

const char* task_kind_name(TaskKind kind);
TaskKind task_kind_from(const std::string& name);
const char* geometry_kind_name(GeometryKind kind);
GeometryKind geometry_kind_from(const std::string& name);

} // namespace geofuse
