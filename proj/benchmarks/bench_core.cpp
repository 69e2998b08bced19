#include <benchmark/benchmark.h>

#include "geofuse/fusion.hpp"
#include "geofuse/kmeans.hpp"
#include "geofuse/locenc.hpp"
#include "geofuse/optim.hpp"

using namespace geofuse;

namespace {

ParamStore head_params;
const LocationEncoder& wrap_encoder() {
    static LocationEncoder enc = [] {
        EncoderConfig cfg;
        cfg.kind = EncoderKind::Wrap;
        return make_location_encoder(head_params, cfg, 7);
    }();
    return enc;
}

void BM_EncodeLocation(benchmark::State& state) {
    const LocationEncoder& enc = wrap_encoder();
    EncoderInput in;
    in.point = {37.4, -122.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode_location_value(enc, head_params, in));
    }
}
BENCHMARK(BM_EncodeLocation);

void BM_EncoderBackward(benchmark::State& state) {
    const LocationEncoder& enc = wrap_encoder();
    EncoderInput in;
    in.point = {37.4, -122.1};
    GradStore grads(head_params);
    for (auto _ : state) {
        Tape tape(head_params);
        Var emb = encode_location(enc, tape, in);
        tape.backward(emb, Tensor2::filled(kEmbedDim, 1, 1.0), grads);
        benchmark::DoNotOptimize(grads);
    }
}
BENCHMARK(BM_EncoderBackward);

void BM_RffFeaturize(benchmark::State& state) {
    const RffFeaturizer rff = RffFeaturizer::make(kDefaultRffDim, 1.0, 3);
    const GeoPoint p{12.0, 77.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(rff_featurize(p, rff));
    }
}
BENCHMARK(BM_RffFeaturize);

void BM_D3gRelation(benchmark::State& state) {
    Rng rng(11);
    Tensor2 a(kEmbedDim, 1);
    Tensor2 b(kEmbedDim, 1);
    Tensor2 w(4, kEmbedDim);
    for (auto& x : a.data) {
        x = rng.normal();
    }
    for (auto& x : b.data) {
        x = rng.normal();
    }
    for (auto& x : w.data) {
        x = rng.normal();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(d3g_relation_value(a, b, w));
    }
}
BENCHMARK(BM_D3gRelation);

void BM_KmeansFit(benchmark::State& state) {
    Rng rng(5);
    const int n = static_cast<int>(state.range(0));
    Tensor2 pts(n, 16);
    for (auto& x : pts.data) {
        x = rng.normal();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(kmeans_fit(pts, 8, 1));
    }
}
BENCHMARK(BM_KmeansFit)->Arg(512)->Arg(2048);

} // namespace

BENCHMARK_MAIN();
