#include "geofuse/autodiff.hpp"

#include <cmath>
#include <utility>

#include "geofuse/errors.hpp"
#include "geofuse/losses.hpp"

namespace geofuse {

// ---- ParamStore / GradStore ----

ParamId ParamStore::add(std::string name, Tensor2 value) {
    if (index_.count(name)) {
        throw ConfigError("duplicate parameter name: " + name);
    }
    const ParamId id = static_cast<ParamId>(values_.size());
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    values_.push_back(std::move(value));
    return id;
}

ParamId ParamStore::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? -1 : it->second;
}

GradStore::GradStore(const ParamStore& params) {
    grads_.reserve(static_cast<std::size_t>(params.size()));
    for (ParamId id = 0; id < params.size(); ++id) {
        const Tensor2& v = params.value(id);
        grads_.emplace_back(v.rows, v.cols);
    }
}

void GradStore::zero() {
    for (auto& g : grads_) {
        std::fill(g.data.begin(), g.data.end(), 0.0);
    }
}

bool GradStore::all_finite() const {
    for (const auto& g : grads_) {
        if (!g.all_finite()) {
            return false;
        }
    }
    return true;
}

// ---- Tape ----

Tape::Tape(const ParamStore& params) : params_(&params) {}

const Tensor2& Tape::node_val(int id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.op == Op::Param) {
        return params_->value(n.param);
    }
    return n.value;
}

const Tensor2& Tape::val(Var v) const { return node_val(v.id); }

int Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

void Tape::check_vec(Var v, const char* op) const {
    if (node_val(v.id).cols != 1) {
        throw ShapeError(std::string(op) + " expects a column vector, got " +
                         node_val(v.id).shape_str());
    }
}

Var Tape::input(Tensor2 v) {
    Node n;
    n.op = Op::Input;
    n.value = std::move(v);
    return {push(std::move(n))};
}

Var Tape::param(ParamId id) {
    auto it = param_nodes_.find(id);
    if (it != param_nodes_.end()) {
        return {it->second};
    }
    Node n;
    n.op = Op::Param;
    n.param = id;
    const int node_id = push(std::move(n));
    param_nodes_.emplace(id, node_id);
    return {node_id};
}

Var Tape::matmul(Var a, Var b) {
    Node n;
    n.op = Op::MatMul;
    n.a = a.id;
    n.b = b.id;
    n.value = geofuse::matmul(node_val(a.id), node_val(b.id));
    return {push(std::move(n))};
}

Var Tape::add(Var a, Var b) {
    Node n;
    n.op = Op::Add;
    n.a = a.id;
    n.b = b.id;
    n.value = geofuse::add(node_val(a.id), node_val(b.id));
    return {push(std::move(n))};
}

Var Tape::sub(Var a, Var b) {
    Node n;
    n.op = Op::Sub;
    n.a = a.id;
    n.b = b.id;
    n.value = geofuse::sub(node_val(a.id), node_val(b.id));
    return {push(std::move(n))};
}

Var Tape::scale(Var a, double c) {
    Node n;
    n.op = Op::Scale;
    n.a = a.id;
    n.c = c;
    n.value = geofuse::scale(node_val(a.id), c);
    return {push(std::move(n))};
}

Var Tape::add_const(Var a, double c) {
    Node n;
    n.op = Op::AddConst;
    n.a = a.id;
    n.c = c;
    n.value = node_val(a.id);
    for (auto& x : n.value.data) {
        x += c;
    }
    return {push(std::move(n))};
}

Var Tape::hadamard(Var a, Var b) {
    Node n;
    n.op = Op::Hadamard;
    n.a = a.id;
    n.b = b.id;
    n.value = geofuse::hadamard(node_val(a.id), node_val(b.id));
    return {push(std::move(n))};
}

Var Tape::relu(Var a) {
    Node n;
    n.op = Op::Relu;
    n.a = a.id;
    n.value = node_val(a.id);
    for (auto& x : n.value.data) {
        if (x < 0.0) {
            x = 0.0;
        }
    }
    return {push(std::move(n))};
}

Var Tape::softmax(Var a) {
    check_vec(a, "softmax");
    Node n;
    n.op = Op::Softmax;
    n.a = a.id;
    n.value = softmax_vec(node_val(a.id));
    return {push(std::move(n))};
}

Var Tape::vconcat(Var a, Var b) {
    check_vec(a, "vconcat");
    check_vec(b, "vconcat");
    const Tensor2& va = node_val(a.id);
    const Tensor2& vb = node_val(b.id);
    Node n;
    n.op = Op::VConcat;
    n.a = a.id;
    n.b = b.id;
    n.value = Tensor2(va.rows + vb.rows, 1);
    std::copy(va.data.begin(), va.data.end(), n.value.data.begin());
    std::copy(vb.data.begin(), vb.data.end(), n.value.data.begin() + va.rows);
    return {push(std::move(n))};
}

Var Tape::cosine(Var a, Var b) {
    const Tensor2& u = node_val(a.id);
    const Tensor2& v = node_val(b.id);
    if (u.size() != v.size()) {
        throw ShapeError("cosine shape mismatch: " + u.shape_str() + " vs " + v.shape_str());
    }
    const double nu = std::sqrt(dot_all(u, u));
    const double nv = std::sqrt(dot_all(v, v));
    if (nu == 0.0 || nv == 0.0) {
        throw ValidationError("cosine similarity of a zero-norm vector is undefined");
    }
    Node n;
    n.op = Op::Cosine;
    n.a = a.id;
    n.b = b.id;
    n.value = Tensor2(1, 1, {dot_all(u, v) / (nu * nv)});
    return {push(std::move(n))};
}

Var Tape::stack_scalars(std::span<const Var> scalars) {
    Node n;
    n.op = Op::StackScalars;
    n.value = Tensor2(static_cast<int>(scalars.size()), 1);
    n.args.reserve(scalars.size());
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        const Tensor2& s = node_val(scalars[i].id);
        if (s.size() != 1) {
            throw ShapeError("stack_scalars expects 1x1 inputs, got " + s.shape_str());
        }
        n.args.push_back(scalars[i].id);
        n.value.data[i] = s.data[0];
    }
    return {push(std::move(n))};
}

Var Tape::select(Var v, int index) {
    check_vec(v, "select");
    const Tensor2& x = node_val(v.id);
    if (index < 0 || index >= x.rows) {
        throw ShapeError("select index " + std::to_string(index) + " out of range for " +
                         x.shape_str());
    }
    Node n;
    n.op = Op::Select;
    n.a = v.id;
    n.index = index;
    n.value = Tensor2(1, 1, {x.data[static_cast<std::size_t>(index)]});
    return {push(std::move(n))};
}

Var Tape::scale_by(Var s, Var a) {
    const Tensor2& sv = node_val(s.id);
    if (sv.size() != 1) {
        throw ShapeError("scale_by expects a 1x1 scale, got " + sv.shape_str());
    }
    Node n;
    n.op = Op::ScaleBy;
    n.a = s.id;
    n.b = a.id;
    n.value = geofuse::scale(node_val(a.id), sv.data[0]);
    return {push(std::move(n))};
}

Var Tape::row_embed(Var matrix, int row) {
    const Tensor2& m = node_val(matrix.id);
    if (row < 0 || row >= m.rows) {
        throw ShapeError("row_embed row " + std::to_string(row) + " out of range for " +
                         m.shape_str());
    }
    Node n;
    n.op = Op::RowEmbed;
    n.a = matrix.id;
    n.index = row;
    n.value = Tensor2(m.cols, 1);
    for (int j = 0; j < m.cols; ++j) {
        n.value.data[static_cast<std::size_t>(j)] = m.at(row, j);
    }
    return {push(std::move(n))};
}

Var Tape::cross_entropy(Var logits, int target) {
    check_vec(logits, "cross_entropy");
    const LossGrad lg = geofuse::cross_entropy(node_val(logits.id), target);
    Node n;
    n.op = Op::CrossEntropy;
    n.a = logits.id;
    n.index = target;
    n.value = Tensor2(1, 1, {lg.loss});
    n.aux = lg.grad;
    return {push(std::move(n))};
}

Var Tape::mse(Var pred, const Tensor2& target) {
    const LossGrad lg = geofuse::mse(node_val(pred.id), target);
    Node n;
    n.op = Op::Mse;
    n.a = pred.id;
    n.value = Tensor2(1, 1, {lg.loss});
    n.aux = lg.grad;
    return {push(std::move(n))};
}

Var Tape::geoprior_nll(Var logits, int target) {
    check_vec(logits, "geoprior_nll");
    const LossGrad lg = geofuse::geoprior_loss(node_val(logits.id), target);
    Node n;
    n.op = Op::GeoPriorNll;
    n.a = logits.id;
    n.index = target;
    n.value = Tensor2(1, 1, {lg.loss});
    n.aux = lg.grad;
    return {push(std::move(n))};
}

Tensor2& Tape::grad_buf(int id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0) {
        const Tensor2& v = node_val(id);
        n.grad = Tensor2(v.rows, v.cols);
    }
    return n.grad;
}

Tensor2& Tape::grad_dest(int id, GradStore& sink) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.op == Op::Param) {
        return sink.grad(n.param);
    }
    return grad_buf(id);
}

void Tape::accumulate(int id, const Tensor2& g, GradStore& sink) {
    add_into(grad_dest(id, sink), g);
}

void Tape::accumulate_scaled(int id, const Tensor2& g, double c, GradStore& sink) {
    add_scaled_into(grad_dest(id, sink), g, c);
}

void Tape::clear_grads() {
    for (auto& n : nodes_) {
        n.grad = Tensor2();
    }
}

void Tape::backward(std::span<const Seed> seeds, GradStore& sink) {
    clear_grads();
    for (const Seed& s : seeds) {
        const Tensor2& v = node_val(s.var.id);
        if (v.size() != 1) {
            throw ShapeError("backward seed must be scalar (1x1), got " + v.shape_str());
        }
        grad_buf(s.var.id).data[0] += s.coeff;
        if (nodes_[static_cast<std::size_t>(s.var.id)].op == Op::Param) {
            sink.grad(nodes_[static_cast<std::size_t>(s.var.id)].param).data[0] += s.coeff;
        }
    }
    sweep(sink);
}

void Tape::sweep(GradStore& sink) {
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        if (n.grad.size() == 0) {
            continue; // not on any path from the seeds
        }
        const Tensor2& g = n.grad;
        switch (n.op) {
        case Op::Input:
        case Op::Param:
            break;
        case Op::MatMul: {
            const Tensor2& a = node_val(n.a);
            const Tensor2& b = node_val(n.b);
            if (b.cols == 1) {
                // Matrix-vector hot path: accumulate in place, never
                // materializing A^T or the outer product.
                Tensor2& ga = grad_dest(n.a, sink); // += g b^T
                Tensor2& gb = grad_dest(n.b, sink); // += A^T g
                for (int r = 0; r < a.rows; ++r) {
                    const double gr = g.data[static_cast<std::size_t>(r)];
                    if (gr == 0.0) {
                        continue;
                    }
                    double* garow = ga.data.data() + static_cast<std::size_t>(r) * a.cols;
                    const double* arow = a.data.data() + static_cast<std::size_t>(r) * a.cols;
                    for (int k = 0; k < a.cols; ++k) {
                        garow[k] += gr * b.data[static_cast<std::size_t>(k)];
                        gb.data[static_cast<std::size_t>(k)] += gr * arow[k];
                    }
                }
            } else {
                accumulate(n.a, geofuse::matmul(g, transpose(b)), sink);
                accumulate(n.b, geofuse::matmul(transpose(a), g), sink);
            }
            break;
        }
        case Op::Add:
            accumulate(n.a, g, sink);
            accumulate(n.b, g, sink);
            break;
        case Op::Sub:
            accumulate(n.a, g, sink);
            accumulate_scaled(n.b, g, -1.0, sink);
            break;
        case Op::Scale:
            accumulate_scaled(n.a, g, n.c, sink);
            break;
        case Op::AddConst:
            accumulate(n.a, g, sink);
            break;
        case Op::Hadamard: {
            const Tensor2& a = node_val(n.a);
            const Tensor2& b = node_val(n.b);
            Tensor2& ga = grad_dest(n.a, sink);
            Tensor2& gb = grad_dest(n.b, sink);
            for (std::size_t k = 0; k < g.data.size(); ++k) {
                ga.data[k] += g.data[k] * b.data[k];
                gb.data[k] += g.data[k] * a.data[k];
            }
            break;
        }
        case Op::Relu: {
            const Tensor2& x = node_val(n.a);
            Tensor2& gx = grad_dest(n.a, sink);
            for (std::size_t k = 0; k < g.data.size(); ++k) {
                if (x.data[k] > 0.0) {
                    gx.data[k] += g.data[k];
                }
            }
            break;
        }
        case Op::Softmax: {
            const Tensor2& s = n.value;
            double gs = 0.0;
            for (std::size_t k = 0; k < s.data.size(); ++k) {
                gs += g.data[k] * s.data[k];
            }
            Tensor2 gx(s.rows, 1);
            for (std::size_t k = 0; k < s.data.size(); ++k) {
                gx.data[k] = s.data[k] * (g.data[k] - gs);
            }
            accumulate(n.a, gx, sink);
            break;
        }
        case Op::VConcat: {
            const Tensor2& a = node_val(n.a);
            const Tensor2& b = node_val(n.b);
            Tensor2& ga = grad_dest(n.a, sink);
            Tensor2& gb = grad_dest(n.b, sink);
            for (int k = 0; k < a.rows; ++k) {
                ga.data[static_cast<std::size_t>(k)] += g.data[static_cast<std::size_t>(k)];
            }
            for (int k = 0; k < b.rows; ++k) {
                gb.data[static_cast<std::size_t>(k)] +=
                    g.data[static_cast<std::size_t>(a.rows + k)];
            }
            break;
        }
        case Op::Cosine: {
            const Tensor2& u = node_val(n.a);
            const Tensor2& v = node_val(n.b);
            const double nu = std::sqrt(dot_all(u, u));
            const double nv = std::sqrt(dot_all(v, v));
            const double cosv = n.value.data[0];
            const double gs = g.data[0];
            Tensor2 gu(u.rows, u.cols);
            Tensor2 gv(v.rows, v.cols);
            for (std::size_t k = 0; k < u.data.size(); ++k) {
                gu.data[k] = gs * (v.data[k] / (nu * nv) - cosv * u.data[k] / (nu * nu));
                gv.data[k] = gs * (u.data[k] / (nu * nv) - cosv * v.data[k] / (nv * nv));
            }
            accumulate(n.a, gu, sink);
            accumulate(n.b, gv, sink);
            break;
        }
        case Op::StackScalars: {
            Tensor2 one(1, 1);
            for (std::size_t k = 0; k < n.args.size(); ++k) {
                one.data[0] = g.data[k];
                accumulate(n.args[k], one, sink);
            }
            break;
        }
        case Op::Select: {
            const Tensor2& x = node_val(n.a);
            Tensor2 gx(x.rows, 1);
            gx.data[static_cast<std::size_t>(n.index)] = g.data[0];
            accumulate(n.a, gx, sink);
            break;
        }
        case Op::ScaleBy: {
            const Tensor2& a = node_val(n.b);
            const double sv = node_val(n.a).data[0];
            Tensor2 gs(1, 1, {dot_all(g, a)});
            accumulate(n.a, gs, sink);
            accumulate_scaled(n.b, g, sv, sink);
            break;
        }
        case Op::RowEmbed: {
            const Tensor2& m = node_val(n.a);
            Tensor2 gm(m.rows, m.cols);
            for (int j = 0; j < m.cols; ++j) {
                gm.at(n.index, j) = g.data[static_cast<std::size_t>(j)];
            }
            accumulate(n.a, gm, sink);
            break;
        }
        case Op::CrossEntropy:
        case Op::Mse:
        case Op::GeoPriorNll:
            accumulate_scaled(n.a, n.aux, g.data[0], sink);
            break;
        }
    }
}

void Tape::backward(Var output, const Tensor2& output_grad, GradStore& sink) {
    const Tensor2& v = node_val(output.id);
    if (!v.same_shape(output_grad)) {
        throw ShapeError("output_grad shape " + output_grad.shape_str() +
                         " does not match output " + v.shape_str());
    }
    clear_grads();
    grad_buf(output.id) = output_grad;
    Node& out = nodes_[static_cast<std::size_t>(output.id)];
    if (out.op == Op::Param) {
        add_into(sink.grad(out.param), output_grad);
    }
    sweep(sink);
}

const Tensor2& Tape::grad(Var v) const {
    const Node& n = nodes_[static_cast<std::size_t>(v.id)];
    static const Tensor2 empty;
    if (n.grad.size() == 0) {
        return empty;
    }
    return n.grad;
}

GradStore backprop(Tape& tape, Var output, const Tensor2& output_grad) {
    // Fresh sink: untouched parameters report zero gradients.
    GradStore sink(tape.params());
    tape.backward(output, output_grad, sink);
    return sink;
}

} // namespace geofuse
