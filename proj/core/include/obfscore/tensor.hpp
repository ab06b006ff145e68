#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace obfscore {

/// Dense row-major matrix of doubles. Row vectors are 1 x n.
class Tensor {
public:
    Tensor() = default;
    Tensor(int rows, int cols) : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols) {}

    static Tensor scalar(double v) {
        Tensor t(1, 1);
        t.v_[0] = v;
        return t;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* row(int r) { return v_.data() + static_cast<size_t>(r) * cols_; }
    const double* row(int r) const { return v_.data() + static_cast<size_t>(r) * cols_; }

    double& operator()(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }
    double& operator[](size_t i) { return v_[i]; }
    double operator[](size_t i) const { return v_[i]; }

    void fill(double v) { std::fill(v_.begin(), v_.end(), v); }
    void resize(int rows, int cols) {
        rows_ = rows;
        cols_ = cols;
        v_.assign(static_cast<size_t>(rows) * cols, 0.0);
    }

    bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> v_;
};

// Kernels shared by the tape ops and by tape-free inference.

/// out = a * b
void matmul(const Tensor& a, const Tensor& b, Tensor& out);
/// out = a * b^T
void matmul_nt(const Tensor& a, const Tensor& b, Tensor& out);
/// out += a^T * b
void matmul_tn_acc(const Tensor& a, const Tensor& b, Tensor& out);
/// out += a * b
void matmul_acc(const Tensor& a, const Tensor& b, Tensor& out);
/// out += a * b^T
void matmul_nt_acc(const Tensor& a, const Tensor& b, Tensor& out);

void softmax_rows_inplace(Tensor& x);

double gelu(double x);
double gelu_grad(double x);

}  // namespace obfscore
