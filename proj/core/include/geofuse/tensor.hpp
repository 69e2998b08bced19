#pragma once

#include <string>
#include <vector>

namespace geofuse {

// Dense row-major matrix of 64-bit floats. Column vectors are n x 1.
struct Tensor2 {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(int r, int c);
    Tensor2(int r, int c, std::vector<double> d);

    static Tensor2 zeros(int r, int c);
    static Tensor2 filled(int r, int c, double v);
    static Tensor2 identity(int n);
    static Tensor2 column(std::vector<double> d);

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    int size() const { return rows * cols; }
    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }
    bool all_finite() const;
    std::string shape_str() const;
};

Tensor2 matmul(const Tensor2& a, const Tensor2& b);
Tensor2 transpose(const Tensor2& a);
Tensor2 add(const Tensor2& a, const Tensor2& b);
Tensor2 sub(const Tensor2& a, const Tensor2& b);
Tensor2 hadamard(const Tensor2& a, const Tensor2& b);
Tensor2 scale(const Tensor2& a, double c);

// Flattened-element accumulators.
void add_into(Tensor2& dst, const Tensor2& src);               // dst += src
void add_scaled_into(Tensor2& dst, const Tensor2& src, double c); // dst += c * src
double dot_all(const Tensor2& a, const Tensor2& b);
double max_abs(const Tensor2& a);

} // namespace geofuse
