#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "geofuse/geo.hpp"
#include "geofuse/layers.hpp"

namespace geofuse {

inline constexpr int kEmbedDim = 256;   // location embedding width
inline constexpr int kWrapDim = 4;      // [sin lat, cos lat, sin lon, cos lon]
inline constexpr int kDefaultRffDim = 512;
inline constexpr int kHeadBlocks = 4;

enum class EncoderKind {
    Wrap,
    Rff,
    FrozenTable,
    DomainEmbed,
};

// [sin lat, cos lat, sin lon, cos lon], degrees converted to radians.
Tensor2 wrap_featurize(const GeoPoint& p);

// Random Fourier features over u = (lat/90, lon/180):
//   out_j = sqrt(2/dim) * cos(w_j . u + b_j)
// with projection entries Normal(0, sigma^2) and phases Uniform[0, 2pi),
// both frozen after construction. Draw order: projection row-major, then
// phases.
struct RffFeaturizer {
    Tensor2 projection; // dim x 2
    Tensor2 phases;     // dim x 1
    double sigma = 1.0;
    std::uint64_t seed = 0;

    static RffFeaturizer make(int dim, double sigma, std::uint64_t seed);
    int dim() const { return projection.rows; }
};

Tensor2 rff_featurize(const GeoPoint& p, const RffFeaturizer& f);

// Precomputed frozen feature vectors keyed by record id. Never trained.
// File format: CSV with header `key,f0,f1,...,f{D-1}`.
class FrozenTable {
  public:
    static FrozenTable load_csv(const std::string& path);

    // Exact stored vector; missing keys raise DataError naming the key.
    const Tensor2& lookup(const std::string& key) const;

    int dim() const { return dim_; }
    std::size_t size() const { return rows_.size(); }

  private:
    std::unordered_map<std::string, Tensor2> rows_;
    int dim_ = 0;
};

// Ablation featurizer: one learnable embedding row per discrete domain.
struct DomainEmbedTable {
    ParamId table = -1; // num_domains x dim
    int num_domains = 0;
    int dim = kEmbedDim;
};

// Featurizer plus residual head producing kEmbedDim-d embeddings. The head
// is one ReLU linear layer followed by kHeadBlocks residual blocks; the
// DomainEmbed ablation conditions on the raw embedding row and has no head.
struct LocationEncoder {
    EncoderKind kind = EncoderKind::Wrap;
    std::optional<RffFeaturizer> rff;
    std::shared_ptr<const FrozenTable> table;
    std::optional<DomainEmbedTable> domain_embed;
    std::optional<Network> head;
    int out_dim = kEmbedDim;
};

struct EncoderConfig {
    EncoderKind kind = EncoderKind::Wrap;
    int rff_dim = kDefaultRffDim;
    double rff_sigma = 1.0;
    std::shared_ptr<const FrozenTable> table; // required for FrozenTable
    int num_domains = 0;                      // required for DomainEmbed
};

// Builds the encoder, registering head (and DomainEmbed) parameters in
// `params`. Featurizer state (RFF projection/phases, frozen table) is not
// registered and therefore never receives gradients.
LocationEncoder make_location_encoder(ParamStore& params, const EncoderConfig& cfg,
                                      std::uint64_t seed);

// Inputs an encoder may consume; which field is read depends on the kind.
struct EncoderInput {
    GeoPoint point{};
    std::string key;
    int domain = -1;
};

// Featurize then apply the head; output is out_dim x 1. A kind/input
// mismatch raises ConfigError.
Var encode_location(const LocationEncoder& enc, Tape& tape, const EncoderInput& in);
Tensor2 encode_location_value(const LocationEncoder& enc, const ParamStore& params,
                              const EncoderInput& in);

// Whether the encoder maps coordinates (required for cluster maps).
bool coordinate_based(EncoderKind kind);

// Single linear layer mapping embeddings to domain logits.
struct DomainPredictor {
    Linear layer;
};

DomainPredictor make_domain_predictor(ParamStore& params, Rng& rng, int num_domains);
Var predict_domain(const DomainPredictor& dp, Tape& tape, Var embedding);
Tensor2 predict_domain_value(const DomainPredictor& dp, const ParamStore& params,
                             const Tensor2& embedding);

const char* encoder_kind_name(EncoderKind kind);
EncoderKind encoder_kind_from(const std::string& name);

} // namespace geofuse
