#include "geofuse/tensor.hpp"

#include <cmath>
#include <utility>

#include "geofuse/errors.hpp"

namespace geofuse {

Tensor2::Tensor2(int r, int c)
    : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {
    if (r < 0 || c < 0) {
        throw ShapeError("tensor dimensions must be non-negative");
    }
}

Tensor2::Tensor2(int r, int c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    if (static_cast<std::size_t>(r) * static_cast<std::size_t>(c) != data.size()) {
        throw ShapeError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_str());
    }
}

Tensor2 Tensor2::zeros(int r, int c) { return Tensor2(r, c); }

Tensor2 Tensor2::filled(int r, int c, double v) {
    Tensor2 t(r, c);
    for (auto& x : t.data) {
        x = v;
    }
    return t;
}

Tensor2 Tensor2::identity(int n) {
    Tensor2 t(n, n);
    for (int i = 0; i < n; ++i) {
        t.at(i, i) = 1.0;
    }
    return t;
}

Tensor2 Tensor2::column(std::vector<double> d) {
    const int n = static_cast<int>(d.size());
    return Tensor2(n, 1, std::move(d));
}

bool Tensor2::all_finite() const {
    for (double x : data) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

std::string Tensor2::shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    if (a.cols != b.rows) {
        throw ShapeError("matmul shape mismatch: " + a.shape_str() + " * " + b.shape_str());
    }
    Tensor2 out(a.rows, b.cols);
    if (b.cols == 1) {
        // Matrix-vector: one contiguous dot product per row.
        for (int i = 0; i < a.rows; ++i) {
            const double* arow = a.data.data() + static_cast<std::size_t>(i) * a.cols;
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k) {
                acc += arow[k] * b.data[static_cast<std::size_t>(k)];
            }
            out.data[static_cast<std::size_t>(i)] = acc;
        }
        return out;
    }
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + static_cast<std::size_t>(i) * a.cols;
        double* orow = out.data.data() + static_cast<std::size_t>(i) * out.cols;
        for (int k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            const double* brow = b.data.data() + static_cast<std::size_t>(k) * b.cols;
            for (int j = 0; j < b.cols; ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
    return out;
}

Tensor2 transpose(const Tensor2& a) {
    Tensor2 out(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) {
            out.at(j, i) = a.at(i, j);
        }
    }
    return out;
}

namespace {
void require_same_shape(const Tensor2& a, const Tensor2& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + " shape mismatch: " + a.shape_str() + " vs " +
                         b.shape_str());
    }
}
} // namespace

Tensor2 add(const Tensor2& a, const Tensor2& b) {
    require_same_shape(a, b, "add");
    Tensor2 out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] += b.data[i];
    }
    return out;
}

Tensor2 sub(const Tensor2& a, const Tensor2& b) {
    require_same_shape(a, b, "sub");
    Tensor2 out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] -= b.data[i];
    }
    return out;
}

Tensor2 hadamard(const Tensor2& a, const Tensor2& b) {
    require_same_shape(a, b, "hadamard");
    Tensor2 out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] *= b.data[i];
    }
    return out;
}

Tensor2 scale(const Tensor2& a, double c) {
    Tensor2 out = a;
    for (auto& x : out.data) {
        x *= c;
    }
    return out;
}

void add_into(Tensor2& dst, const Tensor2& src) {
    require_same_shape(dst, src, "add_into");
    for (std::size_t i = 0; i < dst.data.size(); ++i) {
        dst.data[i] += src.data[i];
    }
}

void add_scaled_into(Tensor2& dst, const Tensor2& src, double c) {
    require_same_shape(dst, src, "add_scaled_into");
    for (std::size_t i = 0; i < dst.data.size(); ++i) {
        dst.data[i] += c * src.data[i];
    }
}

double dot_all(const Tensor2& a, const Tensor2& b) {
    require_same_shape(a, b, "dot_all");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        acc += a.data[i] * b.data[i];
    }
    return acc;
}

double max_abs(const Tensor2& a) {
    double m = 0.0;
    for (double x : a.data) {
        const double ax = std::fabs(x);
        if (ax > m) {
            m = ax;
        }
    }
    return m;
}

} // namespace geofuse
