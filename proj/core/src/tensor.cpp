#include "obfscore/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace obfscore {

void matmul(const Tensor& a, const Tensor& b, Tensor& out) {
    assert(a.cols() == b.rows());
    out.resize(a.rows(), b.cols());
    const int m = a.rows(), k = a.cols(), n = b.cols();
    for (int i = 0; i < m; ++i) {
        double* orow = out.row(i);
        const double* arow = a.row(i);
        for (int p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b.row(p);
            for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
}

void matmul_acc(const Tensor& a, const Tensor& b, Tensor& out) {
    assert(a.cols() == b.rows());
    assert(out.rows() == a.rows() && out.cols() == b.cols());
    const int m = a.rows(), k = a.cols(), n = b.cols();
    for (int i = 0; i < m; ++i) {
        double* orow = out.row(i);
        const double* arow = a.row(i);
        for (int p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b.row(p);
            for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
}

void matmul_nt(const Tensor& a, const Tensor& b, Tensor& out) {
    assert(a.cols() == b.cols());
    out.resize(a.rows(), b.rows());
    const int m = a.rows(), k = a.cols(), n = b.rows();
    for (int i = 0; i < m; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (int j = 0; j < n; ++j) {
            const double* brow = b.row(j);
            double acc = 0.0;
            for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
            orow[j] = acc;
        }
    }
}

void matmul_nt_acc(const Tensor& a, const Tensor& b, Tensor& out) {
    assert(a.cols() == b.cols());
    assert(out.rows() == a.rows() && out.cols() == b.rows());
    const int m = a.rows(), k = a.cols(), n = b.rows();
    for (int i = 0; i < m; ++i) {
        const double* arow = a.row(i);
        double* orow = out.row(i);
        for (int j = 0; j < n; ++j) {
            const double* brow = b.row(j);
            double acc = 0.0;
            for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
            orow[j] += acc;
        }
    }
}

void matmul_tn_acc(const Tensor& a, const Tensor& b, Tensor& out) {
    assert(a.rows() == b.rows());
    assert(out.rows() == a.cols() && out.cols() == b.cols());
    const int m = a.rows(), k = a.cols(), n = b.cols();
    for (int i = 0; i < m; ++i) {
        const double* arow = a.row(i);
        const double* brow = b.row(i);
        for (int p = 0; p < k; ++p) {
            const double av = arow[p];
            double* orow = out.row(p);
            for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
}

void softmax_rows_inplace(Tensor& x) {
    for (int r = 0; r < x.rows(); ++r) {
        double* row = x.row(r);
        double mx = row[0];
        for (int c = 1; c < x.cols(); ++c) mx = std::max(mx, row[c]);
        double sum = 0.0;
        for (int c = 0; c < x.cols(); ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        const double inv = 1.0 / sum;
        for (int c = 0; c < x.cols(); ++c) row[c] *= inv;
    }
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

double gelu_grad(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) + x * inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

}  // namespace obfscore
