#include "geofuse/fusion.hpp"

#include <cmath>

#include "geofuse/errors.hpp"

namespace geofuse {

ConcatHead make_concat_head(ParamStore& params, Rng& rng, int img_dim, int loc_dim,
                            int out_dim) {
    ConcatHead head;
    head.h = make_linear(params, rng, "fusion.concat.h", img_dim + loc_dim, out_dim, false);
    return head;
}

FilmHead make_film_head(ParamStore& params, Rng& rng, int img_dim, int loc_dim, int out_dim) {
    FilmHead head;
    head.gamma = make_linear(params, rng, "fusion.film.gamma", loc_dim, img_dim, false);
    head.beta = make_linear(params, rng, "fusion.film.beta", loc_dim, img_dim, false);
    head.h = make_linear(params, rng, "fusion.film.h", img_dim, out_dim, false);
    return head;
}

GeoPriorsHead make_geopriors_head(ParamStore& params, Rng& rng, int img_dim, int loc_dim,
                                  int num_classes) {
    GeoPriorsHead head;
    head.h_image = make_linear(params, rng, "fusion.geopriors.h_image", img_dim, num_classes,
                               false);
    head.h_loc = make_linear(params, rng, "fusion.geopriors.h_loc", loc_dim, num_classes, false);
    return head;
}

D3gHead make_d3g_head(ParamStore& params, Rng& rng, int img_dim, int loc_dim, int out_dim,
                      int num_domains, int num_projections, double tau) {
    if (num_domains < 2) {
        throw ConfigError("d3g fusion requires at least 2 training domains");
    }
    if (num_projections < 1) {
        throw ConfigError("d3g fusion requires at least 1 projection vector");
    }
    if (tau <= 0.0) {
        throw ConfigError("d3g softmax temperature must be positive");
    }
    D3gHead head;
    head.num_heads = num_domains;
    head.num_projections = num_projections;
    head.tau = tau;
    head.heads.reserve(static_cast<std::size_t>(num_domains));
    for (int j = 0; j < num_domains; ++j) {
        head.heads.push_back(make_linear(params, rng, "fusion.d3g.head" + std::to_string(j),
                                         img_dim, out_dim, false));
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(loc_dim));
    Tensor2 metadata(num_domains, loc_dim);
    for (auto& x : metadata.data) {
        x = rng.uniform(-bound, bound);
    }
    head.metadata = params.add("fusion.d3g.metadata", std::move(metadata));
    // Projections start near 1 so initial relations are plain cosines.
    Tensor2 projections(num_projections, loc_dim);
    for (auto& x : projections.data) {
        x = 1.0 + 0.1 * rng.uniform(-1.0, 1.0);
    }
    head.projections = params.add("fusion.d3g.projections", std::move(projections));
    return head;
}

Var fuse_concat(const ConcatHead& head, Tape& tape, Var img, Var loc) {
    return forward(head.h, tape, tape.vconcat(img, loc));
}

Var fuse_film(const FilmHead& head, Tape& tape, Var img, Var loc) {
    Var gamma = forward(head.gamma, tape, loc);
    Var beta = forward(head.beta, tape, loc);
    Var modulated = tape.add(tape.hadamard(gamma, img), beta);
    return forward(head.h, tape, modulated);
}

Var d3g_relation(Tape& tape, Var a, Var b, Var w) {
    const int num_projections = tape.val(w).rows;
    if (num_projections < 1) {
        throw ConfigError("d3g relation requires at least one projection vector");
    }
    Var sum{};
    for (int r = 0; r < num_projections; ++r) {
        Var wr = tape.row_embed(w, r);
        Var c = tape.cosine(tape.hadamard(wr, a), tape.hadamard(wr, b));
        sum = (r == 0) ? c : tape.add(sum, c);
    }
    return tape.scale(sum, 1.0 / static_cast<double>(num_projections));
}

double d3g_relation_value(const Tensor2& a, const Tensor2& b, const Tensor2& w) {
    if (a.size() != b.size() || a.size() != w.cols) {
        throw ShapeError("d3g relation shape mismatch: " + a.shape_str() + ", " + b.shape_str() +
                         ", projections " + w.shape_str());
    }
    double total = 0.0;
    for (int r = 0; r < w.rows; ++r) {
        double uv = 0.0;
        double uu = 0.0;
        double vv = 0.0;
        for (int k = 0; k < w.cols; ++k) {
            const double u = w.at(r, k) * a.data[static_cast<std::size_t>(k)];
            const double v = w.at(r, k) * b.data[static_cast<std::size_t>(k)];
            uv += u * v;
            uu += u * u;
            vv += v * v;
        }
        if (uu == 0.0 || vv == 0.0) {
            throw ValidationError("d3g relation: projected vector has zero norm");
        }
        total += uv / (std::sqrt(uu) * std::sqrt(vv));
    }
    return total / static_cast<double>(w.rows);
}

Var d3g_head_relation(const D3gHead& head, Tape& tape, Var loc, int j) {
    Var m = tape.row_embed(tape.param(head.metadata), j);
    return d3g_relation(tape, loc, m, tape.param(head.projections));
}

Var d3g_training_relation(const D3gHead& head, Tape& tape, Var loc, int j, bool same_domain,
                          double beta_interp) {
    Var learned = d3g_head_relation(head, tape, loc, j);
    const double fixed = same_domain ? 1.0 : 0.0;
    return tape.add_const(tape.scale(learned, 1.0 - beta_interp), beta_interp * fixed);
}

Var fuse_d3g(const D3gHead& head, Tape& tape, Var img, Var loc, Var* weights_out) {
    std::vector<Var> relations;
    relations.reserve(static_cast<std::size_t>(head.num_heads));
    for (int j = 0; j < head.num_heads; ++j) {
        relations.push_back(d3g_head_relation(head, tape, loc, j));
    }
    Var weights = tape.softmax(tape.scale(tape.stack_scalars(relations), 1.0 / head.tau));
    if (weights_out != nullptr) {
        *weights_out = weights;
    }
    Var out{};
    for (int j = 0; j < head.num_heads; ++j) {
        Var term = tape.scale_by(tape.select(weights, j),
                                 forward(head.heads[static_cast<std::size_t>(j)], tape, img));
        out = (j == 0) ? term : tape.add(out, term);
    }
    return out;
}

GeoPriorScores geoprior_score(const Tensor2& img_scores, const Tensor2& loc_logits) {
    if (img_scores.cols != 1 || !img_scores.same_shape(loc_logits)) {
        throw ShapeError("geoprior_score expects matching column vectors, got " +
                         img_scores.shape_str() + " and " + loc_logits.shape_str());
    }
    GeoPriorScores out;
    out.scores = Tensor2(img_scores.rows, 1);
    for (int i = 0; i < img_scores.rows; ++i) {
        const double f = img_scores.data[static_cast<std::size_t>(i)];
        if (f < 0.0 || !std::isfinite(f)) {
            throw ValidationError("geoprior_score image score " + std::to_string(i) +
                                  " must be non-negative and finite");
        }
        const double h = loc_logits.data[static_cast<std::size_t>(i)];
        const double sig = h >= 0.0 ? 1.0 / (1.0 + std::exp(-h))
                                    : std::exp(h) / (1.0 + std::exp(h));
        out.scores.data[static_cast<std::size_t>(i)] = f * sig;
    }
    out.predicted = 0;
    for (int i = 1; i < out.scores.rows; ++i) {
        if (out.scores.data[static_cast<std::size_t>(i)] >
            out.scores.data[static_cast<std::size_t>(out.predicted)]) {
            out.predicted = i;
        }
    }
    return out;
}

const char* fusion_kind_name(FusionKind kind) {
    switch (kind) {
    case FusionKind::None:
        return "none";
    case FusionKind::Concat:
        return "concat";
    case FusionKind::Film:
        return "film";
    case FusionKind::GeoPriors:
        return "geopriors";
    case FusionKind::D3g:
        return "d3g";
    }
    return "?";
}

FusionKind fusion_kind_from(const std::string& name) {
    if (name == "none") {
        return FusionKind::None;
    }
    if (name == "concat") {
        return FusionKind::Concat;
    }
    if (name == "film") {
        return FusionKind::Film;
    }
    if (name == "geopriors") {
        return FusionKind::GeoPriors;
    }
    if (name == "d3g") {
        return FusionKind::D3g;
    }
    throw ConfigError("unknown fusion kind: " + name);
}

} // namespace geofuse
