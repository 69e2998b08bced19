#include "geofuse/layers.hpp"

#include <cmath>

#include "geofuse/errors.hpp"

namespace geofuse {

Linear make_linear(ParamStore& params, Rng& rng, const std::string& name, int in, int out,
                   bool relu) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    Tensor2 w(out, in);
    for (auto& x : w.data) {
        x = rng.uniform(-bound, bound);
    }
    Linear l;
    l.W = params.add(name + ".W", std::move(w));
    l.b = params.add(name + ".b", Tensor2(out, 1));
    l.in = in;
    l.out = out;
    l.relu = relu;
    return l;
}

ResBlock make_resblock(ParamStore& params, Rng& rng, const std::string& name, int dim) {
    ResBlock blk;
    blk.l1 = make_linear(params, rng, name + ".l1", dim, dim, true);
    blk.l2 = make_linear(params, rng, name + ".l2", dim, dim, true);
    blk.dim = dim;
    return blk;
}

Var forward(const Linear& layer, Tape& tape, Var x) {
    Var y = tape.add(tape.matmul(tape.param(layer.W), x), tape.param(layer.b));
    return layer.relu ? tape.relu(y) : y;
}

Var forward(const ResBlock& block, Tape& tape, Var x) {
    Var h = forward(block.l1, tape, x);
    Var y = forward(block.l2, tape, h);
    return tape.add(x, y);
}

namespace {
int layer_in_dim(const Layer& layer) {
    if (const auto* l = std::get_if<Linear>(&layer)) {
        return l->in;
    }
    return std::get<ResBlock>(layer).dim;
}
} // namespace

Var forward(const Network& net, Tape& tape, Var x) {
    Var cur = x;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const int want = layer_in_dim(net.layers[i]);
        const Tensor2& v = tape.val(cur);
        if (v.cols != 1 || v.rows != want) {
            throw ShapeError("layer " + std::to_string(i) + " expects input " +
                             std::to_string(want) + "x1, got " + v.shape_str());
        }
        cur = std::visit([&](const auto& l) { return forward(l, tape, cur); }, net.layers[i]);
    }
    return cur;
}

Tensor2 forward_value(const Network& net, const ParamStore& params, const Tensor2& x) {
    Tape tape(params);
    return tape.val(forward(net, tape, tape.input(x)));
}

void collect_params(const Linear& l, std::vector<ParamId>& out) {
    out.push_back(l.W);
    out.push_back(l.b);
}

void collect_params(const Network& net, std::vector<ParamId>& out) {
    for (const Layer& layer : net.layers) {
        if (const auto* l = std::get_if<Linear>(&layer)) {
            collect_params(*l, out);
        } else {
            const auto& blk = std::get<ResBlock>(layer);
            collect_params(blk.l1, out);
            collect_params(blk.l2, out);
        }
    }
}

} // namespace geofuse
