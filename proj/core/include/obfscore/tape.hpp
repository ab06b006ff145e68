#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "obfscore/tensor.hpp"

namespace obfscore {

/// Reverse-mode tape over Tensors. Values are computed eagerly; when recording
/// is enabled each op also registers a backward closure. Node ids are indices
/// in creation order, which is a valid topological order for the sweep.
///
/// Leaf nodes reference caller-owned tensors (no copy), so the same tape code
/// serves both training and tape-free-cost inference (recording off).
class Tape {
public:
    using Id = int;

    explicit Tape(bool recording = true) : recording_(recording) {}
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool recording() const { return recording_; }
    size_t size() const { return nodes_.size(); }

    /// Caller keeps `external` alive for the tape's lifetime.
    Id leaf(const Tensor& external);
    Id constant(Tensor value);

    Id matmul(Id a, Id b);
    Id matmul_nt(Id a, Id b);  // a * b^T
    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id scale(Id a, double c);
    Id add_rowvec(Id a, Id row);                // row broadcast over all rows of a
    Id slice_cols(Id a, int c0, int c1);
    Id slice_rows(Id a, int r0, int r1);
    Id concat_cols(std::span<const Id> parts);
    Id concat_rows(std::span<const Id> parts);
    Id mean_rows(Id a);                          // 1 x cols
    Id masked_mean_rows(Id a, std::vector<double> mask, double eps);
    Id layernorm(Id x, Id gamma, Id beta, double eps = 1e-5);
    Id softmax_rows(Id x);
    Id gelu_op(Id x);
    Id hadamard_const(Id a, Tensor mask);        // dropout-style fixed mask
    Id embedding_rows(Id table, std::vector<int> tokens);
    Id sq_sum(Id a);                             // scalar: sum of squares
    Id zscore_sum(Id f, std::vector<double> mu, std::vector<double> inv_sigma);

    const Tensor& value(Id id) const;
    /// Valid after backward(); zero tensor shape-matched to the value.
    const Tensor& grad(Id id) const;

    /// Seeds d(root)=1 and sweeps the tape in reverse. root must be 1x1.
    void backward(Id root);

private:
    struct Node {
        Tensor storage;
        const Tensor* val = nullptr;
        Tensor grad;
        std::function<void()> back;
    };

    Id push_value(Tensor value);
    Tensor& grad_ref(Id id);

    std::deque<Node> nodes_;
    bool recording_ = true;
    bool swept_ = false;
};

}  // namespace obfscore
