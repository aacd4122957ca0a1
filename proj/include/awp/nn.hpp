// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "awp/params.hpp"

namespace awp::model {

/// Activations of one GRU step, kept for the backward pass.
struct GruCache {
  Eigen::VectorXd x, h_prev, z, r, candidate;
};

/// One gated-recurrent step. Throws UsageError on shape mismatch.
Eigen::VectorXd gru_step(const GruWeights& w, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                         GruCache* cache = nullptr);

/// Accumulates weight gradients into `grad`; writes input and previous-state
/// gradients to dx and dh_prev.
void gru_step_backward(const GruWeights& w, const GruCache& cache, const Eigen::VectorXd& dh,
                       GruWeights& grad, Eigen::VectorXd& dx, Eigen::VectorXd& dh_prev);

/// Numerically stable softmax; equal logits give a uniform distribution.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Lowest index among the maxima.
int argmax(const Eigen::VectorXd& values);

using Mask = std::vector<std::uint8_t>;

struct Attention {
  Eigen::VectorXd context;
  Eigen::VectorXd weights;  // zero at masked positions
};

/// Dot-product attention of `query` over the rows of `keys`. Positions with
/// mask 0 are excluded. Throws DataError if every position is masked.
Attention attend(const Eigen::VectorXd& query, const Eigen::MatrixXd& keys, const Mask& mask);

/// dquery and dkeys are accumulated into, not overwritten.
void attend_backward(const Eigen::VectorXd& query, const Eigen::MatrixXd& keys,
                     const Attention& forward, const Eigen::VectorXd& dcontext,
                     Eigen::VectorXd& dquery, Eigen::MatrixXd& dkeys);

struct EncoderOutput {
  Eigen::MatrixXd states;  // T x hidden, row t = state after position t
  Mask mask;               // 0 at PAD positions
  Eigen::VectorXd final_state;
};

/// Per-position caches of an encoder run (empty entries at PAD positions).
struct EncoderTrace {
  std::vector<int> ids;
  std::vector<GruCache> steps;
};

/// Unidirectional GRU over embedded ids. PAD positions are skipped (the
/// state carries over) and masked. Throws DataError on out-of-range ids.
EncoderOutput encode(std::span<const int> ids, const Eigen::MatrixXd& embed, const GruWeights& gru,
                     EncoderTrace* trace = nullptr);

/// Backpropagates state and final-state gradients through an encoder run.
void encode_backward(const Eigen::MatrixXd& embed, const GruWeights& gru, const EncoderTrace& trace,
                     const Eigen::MatrixXd& dstates, const Eigen::VectorXd& dfinal,
                     Eigen::MatrixXd& dembed, GruWeights& dgru);

}  // namespace awp::model
