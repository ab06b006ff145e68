#include "obfscore/tape.hpp"

#include <cassert>
#include <cmath>

#include "obfscore/errors.hpp"

namespace obfscore {

Tape::Id Tape::push_value(Tensor value) {
    nodes_.emplace_back();
    Node& n = nodes_.back();
    n.storage = std::move(value);
    n.val = &n.storage;
    return static_cast<Id>(nodes_.size()) - 1;
}

Tape::Id Tape::leaf(const Tensor& external) {
    nodes_.emplace_back();
    nodes_.back().val = &external;
    return static_cast<Id>(nodes_.size()) - 1;
}

Tape::Id Tape::constant(Tensor value) { return push_value(std::move(value)); }

const Tensor& Tape::value(Id id) const { return *nodes_[static_cast<size_t>(id)].val; }

const Tensor& Tape::grad(Id id) const { return nodes_[static_cast<size_t>(id)].grad; }

Tensor& Tape::grad_ref(Id id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.empty()) n.grad.resize(n.val->rows(), n.val->cols());
    return n.grad;
}

Tape::Id Tape::matmul(Id a, Id b) {
    Tensor out;
    obfscore::matmul(value(a), value(b), out);
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, b] {
            const Tensor& g = grad(id);
            matmul_nt_acc(g, value(b), grad_ref(a));   // dA += g * B^T
            matmul_tn_acc(value(a), g, grad_ref(b));   // dB += A^T * g
        };
    }
    return id;
}

Tape::Id Tape::matmul_nt(Id a, Id b) {
    Tensor out;
    obfscore::matmul_nt(value(a), value(b), out);
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, b] {
            const Tensor& g = grad(id);
            matmul_acc(g, value(b), grad_ref(a));      // dA += g * B
            matmul_tn_acc(g, value(a), grad_ref(b));   // dB += g^T * A
        };
    }
    return id;
}

Tape::Id Tape::add(Id a, Id b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    assert(va.same_shape(vb));
    Tensor out(va.rows(), va.cols());
    for (size_t i = 0; i < out.size(); ++i) out[i] = va[i] + vb[i];
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, b] {
            const Tensor& g = grad(id);
            Tensor& ga = grad_ref(a);
            Tensor& gb = grad_ref(b);
            for (size_t i = 0; i < g.size(); ++i) {
                ga[i] += g[i];
                gb[i] += g[i];
            }
        };
    }
    return id;
}

Tape::Id Tape::sub(Id a, Id b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    assert(va.same_shape(vb));
    Tensor out(va.rows(), va.cols());
    for (size_t i = 0; i < out.size(); ++i) out[i] = va[i] - vb[i];
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, b] {
            const Tensor& g = grad(id);
            Tensor& ga = grad_ref(a);
            Tensor& gb = grad_ref(b);
            for (size_t i = 0; i < g.size(); ++i) {
                ga[i] += g[i];
                gb[i] -= g[i];
            }
        };
    }
    return id;
}

Tape::Id Tape::scale(Id a, double c) {
    const Tensor& va = value(a);
    Tensor out(va.rows(), va.cols());
    for (size_t i = 0; i < out.size(); ++i) out[i] = va[i] * c;
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, c] {
            const Tensor& g = grad(id);
            Tensor& ga = grad_ref(a);
            for (size_t i = 0; i < g.size(); ++i) ga[i] += c * g[i];
        };
    }
    return id;
}

Tape::Id Tape::add_rowvec(Id a, Id row) {
    const Tensor& va = value(a);
    const Tensor& vr = value(row);
    assert(vr.rows() == 1 && vr.cols() == va.cols());
    Tensor out(va.rows(), va.cols());
    for (int r = 0; r < va.rows(); ++r)
        for (int c = 0; c < va.cols(); ++c) out(r, c) = va(r, c) + vr(0, c);
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, row] {
            const Tensor& g = grad(id);
            Tensor& ga = grad_ref(a);
            Tensor& gr = grad_ref(row);
            for (int r = 0; r < g.rows(); ++r)
                for (int c = 0; c < g.cols(); ++c) {
                    ga(r, c) += g(r, c);
                    gr(0, c) += g(r, c);
                }
        };
    }
    return id;
}

Tape::Id Tape::slice_cols(Id a, int c0, int c1) {
    const Tensor& va = value(a);
    assert(0 <= c0 && c0 < c1 && c1 <= va.cols());
    Tensor out(va.rows(), c1 - c0);
    for (int r = 0; r < va.rows(); ++r)
        for (int c = c0; c < c1; ++c) out(r, c - c0) = va(r, c);
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, c0] {
            const Tensor& g = grad(id);
            Tensor& ga = grad_ref(a);
            for (int r = 0; r < g.rows(); ++r)
                for (int c = 0; c < g.cols(); ++c) ga(r, c0 + c) += g(r, c);
        };
    }
    return id;
}

Tape::Id Tape::slice_rows(Id a, int r0, int r1) {
    const Tensor& va = value(a);
    assert(0 <= r0 && r0 < r1 && r1 <= va.rows());
    Tensor out(r1 - r0, va.cols());
    for (int r = r0; r < r1; ++r)
        for (int c = 0; c < va.cols(); ++c) out(r - r0, c) = va(r, c);
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, r0] {
            const Tensor& g = grad(id);
            Tensor& ga = grad_ref(a);
            for (int r = 0; r < g.rows(); ++r)
                for (int c = 0; c < g.cols(); ++c) ga(r0 + r, c) += g(r, c);
        };
    }
    return id;
}

Tape::Id Tape::concat_cols(std::span<const Id> parts) {
    assert(!parts.empty());
    const int rows = value(parts[0]).rows();
    int cols = 0;
    for (Id p : parts) {
        assert(value(p).rows() == rows);
        cols += value(p).cols();
    }
    Tensor out(rows, cols);
    int off = 0;
    for (Id p : parts) {
        const Tensor& vp = value(p);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < vp.cols(); ++c) out(r, off + c) = vp(r, c);
        off += vp.cols();
    }
    const Id id = push_value(std::move(out));
    if (recording_) {
        std::vector<Id> ps(parts.begin(), parts.end());
        nodes_.back().back = [this, id, ps] {
            const Tensor& g = grad(id);
            int off2 = 0;
            for (Id p : ps) {
                Tensor& gp = grad_ref(p);
                for (int r = 0; r < g.rows(); ++r)
                    for (int c = 0; c < gp.cols(); ++c) gp(r, c) += g(r, off2 + c);
                off2 += gp.cols();
            }
        };
    }
    return id;
}

Tape::Id Tape::concat_rows(std::span<const Id> parts) {
    assert(!parts.empty());
    const int cols = value(parts[0]).cols();
    int rows = 0;
    for (Id p : parts) {
        assert(value(p).cols() == cols);
        rows += value(p).rows();
    }
    Tensor out(rows, cols);
    int off = 0;
    for (Id p : parts) {
        const Tensor& vp = value(p);
        for (int r = 0; r < vp.rows(); ++r)
            for (int c = 0; c < cols; ++c) out(off + r, c) = vp(r, c);
        off += vp.rows();
    }
    const Id id = push_value(std::move(out));
    if (recording_) {
        std::vector<Id> ps(parts.begin(), parts.end());
        nodes_.back().back = [this, id, ps] {
            const Tensor& g = grad(id);
            int off2 = 0;
            for (Id p : ps) {
                Tensor& gp = grad_ref(p);
                for (int r = 0; r < gp.rows(); ++r)
                    for (int c = 0; c < g.cols(); ++c) gp(r, c) += g(off2 + r, c);
                off2 += gp.rows();
            }
        };
    }
    return id;
}

Tape::Id Tape::mean_rows(Id a) {
    const Tensor& va = value(a);
    Tensor out(1, va.cols());
    for (int r = 0; r < va.rows(); ++r)
        for (int c = 0; c < va.cols(); ++c) out(0, c) += va(r, c);
    const double inv = 1.0 / va.rows();
    for (int c = 0; c < va.cols(); ++c) out(0, c) *= inv;
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, inv] {
            const Tensor& g = grad(id);
            Tensor& ga = grad_ref(a);
            for (int r = 0; r < ga.rows(); ++r)
                for (int c = 0; c < ga.cols(); ++c) ga(r, c) += inv * g(0, c);
        };
    }
    return id;
}

Tape::Id Tape::masked_mean_rows(Id a, std::vector<double> mask, double eps) {
    const Tensor& va = value(a);
    assert(static_cast<int>(mask.size()) == va.rows());
    double denom = eps;
    for (double m : mask) denom += m;
    if (denom <= eps) throw EmptyContract("masked mean over an all-zero mask");
    Tensor out(1, va.cols());
    for (int r = 0; r < va.rows(); ++r) {
        if (mask[static_cast<size_t>(r)] == 0.0) continue;
        const double m = mask[static_cast<size_t>(r)];
        for (int c = 0; c < va.cols(); ++c) out(0, c) += m * va(r, c);
    }
    const double inv = 1.0 / denom;
    for (int c = 0; c < va.cols(); ++c) out(0, c) *= inv;
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, mask = std::move(mask), inv] {
            const Tensor& g = grad(id);
            Tensor& ga = grad_ref(a);
            for (int r = 0; r < ga.rows(); ++r) {
                const double w = mask[static_cast<size_t>(r)] * inv;
                if (w == 0.0) continue;
                for (int c = 0; c < ga.cols(); ++c) ga(r, c) += w * g(0, c);
            }
        };
    }
    return id;
}

Tape::Id Tape::layernorm(Id x, Id gamma, Id beta, double eps) {
    const Tensor& vx = value(x);
    const Tensor& vg = value(gamma);
    const Tensor& vb = value(beta);
    assert(vg.rows() == 1 && vg.cols() == vx.cols());
    assert(vb.rows() == 1 && vb.cols() == vx.cols());
    const int R = vx.rows(), C = vx.cols();

    Tensor xhat(R, C);
    std::vector<double> inv_std(static_cast<size_t>(R));
    Tensor out(R, C);
    for (int r = 0; r < R; ++r) {
        const double* xr = vx.row(r);
        double mean = 0.0;
        for (int c = 0; c < C; ++c) mean += xr[c];
        mean /= C;
        double var = 0.0;
        for (int c = 0; c < C; ++c) {
            const double d = xr[c] - mean;
            var += d * d;
        }
        var /= C;
        const double inv = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(r)] = inv;
        for (int c = 0; c < C; ++c) {
            const double h = (xr[c] - mean) * inv;
            xhat(r, c) = h;
            out(r, c) = h * vg(0, c) + vb(0, c);
        }
    }
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, x, gamma, beta, xhat = std::move(xhat),
                              inv_std = std::move(inv_std)] {
            const Tensor& g = grad(id);
            const Tensor& vg = value(gamma);
            Tensor& gx = grad_ref(x);
            Tensor& gg = grad_ref(gamma);
            Tensor& gb = grad_ref(beta);
            const int R = g.rows(), C = g.cols();
            for (int r = 0; r < R; ++r) {
                double mean_gy = 0.0, mean_gyxh = 0.0;
                for (int c = 0; c < C; ++c) {
                    const double gy = g(r, c) * vg(0, c);
                    mean_gy += gy;
                    mean_gyxh += gy * xhat(r, c);
                }
                mean_gy /= C;
                mean_gyxh /= C;
                const double inv = inv_std[static_cast<size_t>(r)];
                for (int c = 0; c < C; ++c) {
                    const double gy = g(r, c) * vg(0, c);
                    gx(r, c) += inv * (gy - mean_gy - xhat(r, c) * mean_gyxh);
                    gg(0, c) += g(r, c) * xhat(r, c);
                    gb(0, c) += g(r, c);
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::softmax_rows(Id x) {
    Tensor out = value(x);
    softmax_rows_inplace(out);
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, x] {
            const Tensor& y = value(id);
            const Tensor& g = grad(id);
            Tensor& gx = grad_ref(x);
            for (int r = 0; r < y.rows(); ++r) {
                double dot = 0.0;
                for (int c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
                for (int c = 0; c < y.cols(); ++c) gx(r, c) += y(r, c) * (g(r, c) - dot);
            }
        };
    }
    return id;
}

Tape::Id Tape::gelu_op(Id x) {
    const Tensor& vx = value(x);
    Tensor out(vx.rows(), vx.cols());
    for (size_t i = 0; i < out.size(); ++i) out[i] = gelu(vx[i]);
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, x] {
            const Tensor& vx2 = value(x);
            const Tensor& g = grad(id);
            Tensor& gx = grad_ref(x);
            for (size_t i = 0; i < g.size(); ++i) gx[i] += gelu_grad(vx2[i]) * g[i];
        };
    }
    return id;
}

Tape::Id Tape::hadamard_const(Id a, Tensor mask) {
    const Tensor& va = value(a);
    assert(va.same_shape(mask));
    Tensor out(va.rows(), va.cols());
    for (size_t i = 0; i < out.size(); ++i) out[i] = va[i] * mask[i];
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, a, mask = std::move(mask)] {
            const Tensor& g = grad(id);
            Tensor& ga = grad_ref(a);
            for (size_t i = 0; i < g.size(); ++i) ga[i] += mask[i] * g[i];
        };
    }
    return id;
}

Tape::Id Tape::embedding_rows(Id table, std::vector<int> tokens) {
    const Tensor& tab = value(table);
    Tensor out(static_cast<int>(tokens.size()), tab.cols());
    for (size_t i = 0; i < tokens.size(); ++i) {
        assert(tokens[i] >= 0 && tokens[i] < tab.rows());
        const double* src = tab.row(tokens[i]);
        double* dst = out.row(static_cast<int>(i));
        for (int c = 0; c < tab.cols(); ++c) dst[c] = src[c];
    }
    const Id id = push_value(std::move(out));
    if (recording_) {
        nodes_.back().back = [this, id, table, tokens = std::move(tokens)] {
            const Tensor& g = grad(id);
            Tensor& gt = grad_ref(table);
            for (size_t i = 0; i < tokens.size(); ++i) {
                double* dst = gt.row(tokens[i]);
                const double* src = g.row(static_cast<int>(i));
                for (int c = 0; c < g.cols(); ++c) dst[c] += src[c];
            }
        };
    }
    return id;
}

Tape::Id Tape::sq_sum(Id a) {
    const Tensor& va = value(a);
    double acc = 0.0;
    for (size_t i = 0; i < va.size(); ++i) acc += va[i] * va[i];
    const Id id = push_value(Tensor::scalar(acc));
    if (recording_) {
        nodes_.back().back = [this, id, a] {
            const double g = grad(id)[0];
            const Tensor& va2 = value(a);
            Tensor& ga = grad_ref(a);
            for (size_t i = 0; i < ga.size(); ++i) ga[i] += 2.0 * va2[i] * g;
        };
    }
    return id;
}

Tape::Id Tape::zscore_sum(Id f, std::vector<double> mu, std::vector<double> inv_sigma) {
    const Tensor& vf = value(f);
    assert(vf.rows() == 1 && vf.size() == mu.size() && mu.size() == inv_sigma.size());
    double acc = 0.0;
    for (size_t k = 0; k < mu.size(); ++k) acc += (vf[k] - mu[k]) * inv_sigma[k];
    const Id id = push_value(Tensor::scalar(acc));
    if (recording_) {
        nodes_.back().back = [this, id, f, inv_sigma = std::move(inv_sigma)] {
            const double g = grad(id)[0];
            Tensor& gf = grad_ref(f);
            for (size_t k = 0; k < gf.size(); ++k) gf[k] += inv_sigma[k] * g;
        };
    }
    return id;
}

void Tape::backward(Id root) {
    if (!recording_) throw NumericError("backward on a non-recording tape");
    if (swept_) throw NumericError("tape already swept");
    swept_ = true;
    assert(value(root).rows() == 1 && value(root).cols() == 1);
    grad_ref(root)[0] = 1.0;
    for (Id id = static_cast<Id>(nodes_.size()) - 1; id >= 0; --id) {
        Node& n = nodes_[static_cast<size_t>(id)];
        if (!n.back) continue;
        if (n.grad.empty()) continue;  // never consumed downstream of root
        n.back();
    }
}

}  // namespace obfscore
