#pragma once

#include <cstdint>
#include <vector>

#include "geofuse/layers.hpp"
#include "geofuse/losses.hpp"

namespace geofuse {

enum class FusionKind {
    None, // task head on image features only (ERM / GroupDRO baselines)
    Concat,
    Film,
    GeoPriors,
    D3g,
};

// Linear head over [image ; location] concatenation.
struct ConcatHead {
    Linear h;
};

// Feature-wise modulation: h(gamma(loc) * img + beta(loc)).
struct FilmHead {
    Linear gamma;
    Linear beta;
    Linear h;
};

// Independent image and location class scorers; combined multiplicatively at
// prediction time, see geoprior_score.
struct GeoPriorsHead {
    Linear h_image;
    Linear h_loc;
};

// Per-domain prediction heads mixed by learned location-domain relations.
struct D3gHead {
    std::vector<Linear> heads; // one per training domain
    ParamId metadata = -1;     // num_heads x embed_dim, learnable m_j
    ParamId projections = -1;  // num_projections x embed_dim, learnable w_r
    int num_heads = 0;
    int num_projections = 4;
    double tau = 1.0; // softmax temperature over relations
};

ConcatHead make_concat_head(ParamStore& params, Rng& rng, int img_dim, int loc_dim, int out_dim);
FilmHead make_film_head(ParamStore& params, Rng& rng, int img_dim, int loc_dim, int out_dim);
GeoPriorsHead make_geopriors_head(ParamStore& params, Rng& rng, int img_dim, int loc_dim,
                                  int num_classes);
D3gHead make_d3g_head(ParamStore& params, Rng& rng, int img_dim, int loc_dim, int out_dim,
                      int num_domains, int num_projections, double tau);

Var fuse_concat(const ConcatHead& head, Tape& tape, Var img, Var loc);
Var fuse_film(const FilmHead& head, Tape& tape, Var img, Var loc);

// Mean over r of cosine(w_r * a, w_r * b) with elementwise projections;
// symmetric in (a, b) and within [-1, 1]. `w` is an R x dim matrix var.
Var d3g_relation(Tape& tape, Var a, Var b, Var w);
double d3g_relation_value(const Tensor2& a, const Tensor2& b, const Tensor2& w);

// Learned relation between a location embedding and head j's metadata.
Var d3g_head_relation(const D3gHead& head, Tape& tape, Var loc, int j);

// Training-time relation: beta_interp * fixed + (1 - beta_interp) * learned,
// where fixed is 1 for the record's own domain and 0 otherwise.
Var d3g_training_relation(const D3gHead& head, Tape& tape, Var loc, int j, bool same_domain,
                          double beta_interp);

// softmax_j(relation_j / tau) mixture of the per-domain head outputs. When
// `weights_out` is non-null it receives the mixture weight vector var.
Var fuse_d3g(const D3gHead& head, Tape& tape, Var img, Var loc, Var* weights_out = nullptr);

// Geo Priors prediction rule: score_i = f_i * sigmoid(h_i), argmax with
// lowest-index tie-break. Image scores must be non-negative.
struct GeoPriorScores {
    Tensor2 scores;
    int predicted = 0;
};
GeoPriorScores geoprior_score(const Tensor2& img_scores, const Tensor2& loc_logits);

const char* fusion_kind_name(FusionKind kind);
FusionKind fusion_kind_from(const std::string& name);

} // namespace geofuse
