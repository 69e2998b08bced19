#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geofuse/tensor.hpp"

namespace geofuse {

using ParamId = int;

// Owns every trainable tensor of a model, in registration order. Gradients,
// optimizer state and checkpoints are all keyed by the same ids/names, and
// registration order fixes the weight-initialization draw order.
class ParamStore {
  public:
    ParamId add(std::string name, Tensor2 value);
    int size() const { return static_cast<int>(values_.size()); }
    const std::string& name(ParamId id) const { return names_[static_cast<std::size_t>(id)]; }
    Tensor2& value(ParamId id) { return values_[static_cast<std::size_t>(id)]; }
    const Tensor2& value(ParamId id) const { return values_[static_cast<std::size_t>(id)]; }
    ParamId find(std::string_view name) const; // -1 when absent

  private:
    std::vector<std::string> names_;
    std::vector<Tensor2> values_;
    std::unordered_map<std::string, ParamId> index_;
};

// Dense gradient sink aligned with a ParamStore; untouched parameters stay
// at zero.
class GradStore {
  public:
    explicit GradStore(const ParamStore& params);
    Tensor2& grad(ParamId id) { return grads_[static_cast<std::size_t>(id)]; }
    const Tensor2& grad(ParamId id) const { return grads_[static_cast<std::size_t>(id)]; }
    int size() const { return static_cast<int>(grads_.size()); }
    void zero();
    bool all_finite() const;

  private:
    std::vector<Tensor2> grads_;
};

struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

// One forward pass recorded as a flat list of primitive operations with
// cached intermediates. backward() visits the list once, in reverse order.
// Parameter leaves reference ParamStore tensors (no copies); their gradients
// are accumulated straight into a GradStore.
class Tape {
  public:
    explicit Tape(const ParamStore& params);

    // Leaves.
    Var input(Tensor2 v);
    Var param(ParamId id); // deduplicated per tape

    // Primitives.
    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var scale(Var a, double c);          // c * a
    Var add_const(Var a, double c);      // a + c (elementwise)
    Var hadamard(Var a, Var b);
    Var relu(Var a);                     // derivative at 0 taken as 0
    Var softmax(Var a);                  // column vector
    Var vconcat(Var a, Var b);           // stack column vectors
    Var cosine(Var a, Var b);            // cosine similarity of flattened args, 1x1
    Var stack_scalars(std::span<const Var> scalars); // n 1x1 vars -> n x 1
    Var select(Var v, int index);        // element of a column vector, 1x1
    Var scale_by(Var s, Var a);          // s (1x1) * a

    // Row r of a matrix, returned as a column vector. Backward scatters into
    // that row only (used for learnable embedding tables).
    Var row_embed(Var matrix, int row);

    // Fused losses (scalar outputs). Gradients follow losses.hpp closed forms.
    Var cross_entropy(Var logits, int target);
    Var mse(Var pred, const Tensor2& target);
    Var geoprior_nll(Var logits, int target);

    // Stable across later recording: nodes live in a deque.
    const Tensor2& val(Var v) const;
    int node_count() const { return static_cast<int>(nodes_.size()); }

    // Reverse sweep. Each seed adds `coeff` to the (scalar) seed node's
    // gradient before the sweep; parameter gradients accumulate into `sink`,
    // which is not zeroed here so batches can accumulate across tapes.
    struct Seed {
        Var var;
        double coeff = 1.0;
    };
    void backward(std::span<const Seed> seeds, GradStore& sink);

    // Seeds an arbitrary (possibly non-scalar) output with output_grad.
    void backward(Var output, const Tensor2& output_grad, GradStore& sink);

    // Gradient w.r.t. a non-parameter node from the last backward() call
    // (e.g. the gradient reaching an input leaf). Parameter gradients live
    // in the GradStore sink only.
    const Tensor2& grad(Var v) const;

    const ParamStore& params() const { return *params_; }

  private:
    enum class Op : std::uint8_t {
        Input,
        Param,
        MatMul,
        Add,
        Sub,
        Scale,
        AddConst,
        Hadamard,
        Relu,
        Softmax,
        VConcat,
        Cosine,
        StackScalars,
        Select,
        ScaleBy,
        RowEmbed,
        CrossEntropy,
        Mse,
        GeoPriorNll,
    };

    struct Node {
        Op op;
        int a = -1;
        int b = -1;
        std::vector<int> args; // StackScalars only
        double c = 0.0;        // Scale / AddConst constant
        int index = -1;        // class target / row / element index
        ParamId param = -1;
        Tensor2 value;         // computed nodes; empty for Param
        Tensor2 aux;           // cached extras (softmax probs, sigmoids, mse target)
        Tensor2 grad;
    };

    const Tensor2& node_val(int id) const;
    Tensor2& grad_buf(int id);
    Tensor2& grad_dest(int id, GradStore& sink);
    void accumulate(int id, const Tensor2& g, GradStore& sink);
    void accumulate_scaled(int id, const Tensor2& g, double c, GradStore& sink);
    void clear_grads();
    void sweep(GradStore& sink);
    int push(Node n);
    void check_vec(Var v, const char* op) const;

    const ParamStore* params_;
    std::deque<Node> nodes_;
    std::unordered_map<ParamId, int> param_nodes_;
};

// Runs the reverse sweep for an already-recorded forward pass: seeds `output`
// with `output_grad`, accumulates parameter gradients into a fresh GradStore
// (zeros for untouched parameters) and returns it. The gradient w.r.t. any
// input leaf is available from tape.grad() afterwards.
GradStore backprop(Tape& tape, Var output, const Tensor2& output_grad);

} // namespace geofuse
