#pragma once

#include <string>
#include <variant>
#include <vector>

#include "geofuse/autodiff.hpp"
#include "geofuse/rng.hpp"
#include "geofuse/tensor.hpp"

namespace geofuse {

// Affine map y = W x + b, weights W (out x in), bias b (out x 1). When
// `relu` is set the activation is applied to the output.
struct Linear {
    ParamId W = -1;
    ParamId b = -1;
    int in = 0;
    int out = 0;
    bool relu = false;
};

// Two ReLU linear layers plus a skip connection:
//   y = x + relu(W2 relu(W1 x + b1) + b2)
// Input and output dims are equal by construction.
struct ResBlock {
    Linear l1;
    Linear l2;
    int dim = 0;
};

using Layer = std::variant<Linear, ResBlock>;

// Sequence of layers executed in order.
struct Network {
    std::vector<Layer> layers;
    int in_dim = 0;
    int out_dim = 0;
};

// Registers fresh parameters and fills them: W ~ uniform(-1/sqrt(fan_in),
// +1/sqrt(fan_in)) drawn row-major, biases zero.
Linear make_linear(ParamStore& params, Rng& rng, const std::string& name, int in, int out,
                   bool relu = false);
ResBlock make_resblock(ParamStore& params, Rng& rng, const std::string& name, int dim);

Var forward(const Linear& layer, Tape& tape, Var x);
Var forward(const ResBlock& block, Tape& tape, Var x);

// Runs the layer sequence, checking dims before each layer; a mismatch
// raises ShapeError naming the offending layer index.
Var forward(const Network& net, Tape& tape, Var x);

// Value-only convenience (records a throwaway tape internally, so the
// training and evaluation paths are one implementation).
Tensor2 forward_value(const Network& net, const ParamStore& params, const Tensor2& x);

// All parameter ids owned by a layer/network, in registration order.
void collect_params(const Network& net, std::vector<ParamId>& out);
void collect_params(const Linear& l, std::vector<ParamId>& out);

} // namespace geofuse
