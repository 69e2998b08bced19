#include "geofuse/locenc.hpp"

#include <cmath>
#include <fstream>

#include "csv_util.hpp"
#include "geofuse/errors.hpp"

namespace geofuse {

Tensor2 wrap_featurize(const GeoPoint& p) {
    validate(p);
    const double lat = deg2rad(p.lat);
    const double lon = deg2rad(p.lon);
    return Tensor2(kWrapDim, 1, {std::sin(lat), std::cos(lat), std::sin(lon), std::cos(lon)});
}

RffFeaturizer RffFeaturizer::make(int dim, double sigma, std::uint64_t seed) {
    if (dim < 1) {
        throw ConfigError("RFF dim must be >= 1");
    }
    if (sigma <= 0.0) {
        throw ConfigError("RFF sigma must be positive");
    }
    Rng rng(mix_seed(seed, "rff"));
    RffFeaturizer f;
    f.sigma = sigma;
    f.seed = seed;
    f.projection = Tensor2(dim, 2);
    for (auto& x : f.projection.data) {
        x = sigma * rng.normal();
    }
    f.phases = Tensor2(dim, 1);
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    for (auto& x : f.phases.data) {
        x = rng.uniform(0.0, kTwoPi);
    }
    return f;
}

Tensor2 rff_featurize(const GeoPoint& p, const RffFeaturizer& f) {
    validate(p);
    if (f.projection.size() == 0) {
        throw ConfigError("RFF featurizer is not initialized");
    }
    const double u0 = p.lat / 90.0;
    const double u1 = p.lon / 180.0;
    const int dim = f.dim();
    const double amp = std::sqrt(2.0 / static_cast<double>(dim));
    Tensor2 out(dim, 1);
    for (int j = 0; j < dim; ++j) {
        const double arg = f.projection.at(j, 0) * u0 + f.projection.at(j, 1) * u1 +
                           f.phases.data[static_cast<std::size_t>(j)];
        out.data[static_cast<std::size_t>(j)] = amp * std::cos(arg);
    }
    return out;
}

FrozenTable FrozenTable::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open frozen feature table: " + path);
    }
    FrozenTable table;
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
            if (fields.empty() || fields[0] != "key") {
                throw DataError(path + ":1: expected header starting with 'key'");
            }
            table.dim_ = static_cast<int>(fields.size()) - 1;
            if (table.dim_ < 1) {
                throw DataError(path + ":1: header has no feature columns");
            }
            header_seen = true;
            continue;
        }
        if (static_cast<int>(fields.size()) != table.dim_ + 1) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(table.dim_ + 1) + " fields, got " +
                            std::to_string(fields.size()));
        }
        Tensor2 vec(table.dim_, 1);
        for (int j = 0; j < table.dim_; ++j) {
            vec.data[static_cast<std::size_t>(j)] =
                csv::parse_double(fields[static_cast<std::size_t>(j) + 1], path, line_no);
        }
        const std::string key(fields[0]);
        if (!table.rows_.emplace(key, std::move(vec)).second) {
            throw DataError(path + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                            "'");
        }
    }
    if (!header_seen) {
        throw DataError(path + ": empty file");
    }
    return table;
}

const Tensor2& FrozenTable::lookup(const std::string& key) const {
    auto it = rows_.find(key);
    if (it == rows_.end()) {
        throw DataError("frozen feature table has no key '" + key + "'");
    }
    return it->second;
}

LocationEncoder make_location_encoder(ParamStore& params, const EncoderConfig& cfg,
                                      std::uint64_t seed) {
    LocationEncoder enc;
    enc.kind = cfg.kind;
    int feat_dim = 0;
    switch (cfg.kind) {
    case EncoderKind::Wrap:
        feat_dim = kWrapDim;
        break;
    case EncoderKind::Rff:
        enc.rff = RffFeaturizer::make(cfg.rff_dim, cfg.rff_sigma, seed);
        feat_dim = cfg.rff_dim;
        break;
    case EncoderKind::FrozenTable:
        if (!cfg.table) {
            throw ConfigError("frozen_table encoder requires a feature table");
        }
        enc.table = cfg.table;
        feat_dim = cfg.table->dim();
        break;
    case EncoderKind::DomainEmbed: {
        if (cfg.num_domains < 2) {
            throw ConfigError("domain_embed encoder requires num_domains >= 2");
        }
        Rng rng(mix_seed(seed, "domain_embed"));
        const double bound = 1.0 / std::sqrt(static_cast<double>(kEmbedDim));
        Tensor2 table(cfg.num_domains, kEmbedDim);
        for (auto& x : table.data) {
            x = rng.uniform(-bound, bound);
        }
        DomainEmbedTable de;
        de.table = params.add("locenc.domain_embed", std::move(table));
        de.num_domains = cfg.num_domains;
        enc.domain_embed = de;
        return enc; // raw embedding is the output, no head
    }
    }
    Rng rng(mix_seed(seed, "locenc"));
    Network head;
    head.in_dim = feat_dim;
    head.out_dim = kEmbedDim;
    head.layers.push_back(make_linear(params, rng, "locenc.head.in", feat_dim, kEmbedDim, true));
    for (int i = 0; i < kHeadBlocks; ++i) {
        head.layers.push_back(
            make_resblock(params, rng, "locenc.head.block" + std::to_string(i), kEmbedDim));
    }
    enc.head = std::move(head);
    return enc;
}

Var encode_location(const LocationEncoder& enc, Tape& tape, const EncoderInput& in) {
    switch (enc.kind) {
    case EncoderKind::Wrap:
        return forward(*enc.head, tape, tape.input(wrap_featurize(in.point)));
    case EncoderKind::Rff:
        return forward(*enc.head, tape, tape.input(rff_featurize(in.point, *enc.rff)));
    case EncoderKind::FrozenTable: {
        if (in.key.empty()) {
            throw ConfigError("frozen_table encoder requires a record key");
        }
        return forward(*enc.head, tape, tape.input(enc.table->lookup(in.key)));
    }
    case EncoderKind::DomainEmbed: {
        const auto& de = *enc.domain_embed;
        if (in.domain < 0 || in.domain >= de.num_domains) {
            throw ValidationError("domain id " + std::to_string(in.domain) +
                                  " out of range for " + std::to_string(de.num_domains) +
                                  " domains");
        }
        return tape.row_embed(tape.param(de.table), in.domain);
    }
    }
    throw ConfigError("unknown encoder kind");
}

Tensor2 encode_location_value(const LocationEncoder& enc, const ParamStore& params,
                              const EncoderInput& in) {
    Tape tape(params);
    return tape.val(encode_location(enc, tape, in));
}

bool coordinate_based(EncoderKind kind) {
    return kind == EncoderKind::Wrap || kind == EncoderKind::Rff;
}

DomainPredictor make_domain_predictor(ParamStore& params, Rng& rng, int num_domains) {
    if (num_domains < 2) {
        throw ConfigError("domain predictor requires num_domains >= 2");
    }
    DomainPredictor dp;
    dp.layer = make_linear(params, rng, "dp", kEmbedDim, num_domains, false);
    return dp;
}

Var predict_domain(const DomainPredictor& dp, Tape& tape, Var embedding) {
    return forward(dp.layer, tape, embedding);
}

Tensor2 predict_domain_value(const DomainPredictor& dp, const ParamStore& params,
                             const Tensor2& embedding) {
    Tape tape(params);
    return tape.val(predict_domain(dp, tape, tape.input(embedding)));
}

const char* encoder_kind_name(EncoderKind kind) {
    switch (kind) {
    case EncoderKind::Wrap:
        return "wrap";
    case EncoderKind::Rff:
        return "rff";
    case EncoderKind::FrozenTable:
        return "frozen_table";
    case EncoderKind::DomainEmbed:
        return "domain_embed";
    }
    return "?";
}

EncoderKind encoder_kind_from(const std::string& name) {
    if (name == "wrap") {
        return EncoderKind::Wrap;
    }
    if (name == "rff") {
        return EncoderKind::Rff;
    }
    if (name == "frozen_table") {
        return EncoderKind::FrozenTable;
    }
    if (name == "domain_embed") {
        return EncoderKind::DomainEmbed;
    }
    throw ConfigError("unknown encoder kind: " + name);
}

} // namespace geofuse
