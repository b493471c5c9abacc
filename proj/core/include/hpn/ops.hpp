#pragma once

#include <cstdint>
#include <vector>

#include "hpn/tape.hpp"
#include "hpn/tensor.hpp"

namespace hpn::op {

/// 3D convolution. input [C_in,X,Y,Z], weights [C_out,C_in,k,k,k] (kernel
/// index x-fastest), bias [C_out]. Output extent per axis is
/// (X + 2*pad - k)/stride + 1 and must divide exactly.
NodeId conv3d(Tape& tape, NodeId input, NodeId weights, NodeId bias, int stride, int zero_padding);

/// Non-overlapping transposed convolution: kernel extent equals the stride,
/// no bias. Each spatial extent is multiplied by the stride.
NodeId conv3d_transposed(Tape& tape, NodeId input, NodeId weights, int stride);

/// Channel concatenation of same-resolution feature maps, input order kept.
NodeId concat_channels(Tape& tape, const std::vector<NodeId>& parts);

NodeId relu(Tape& tape, NodeId x);

/// Per-voxel softmax across the channel axis, max-subtracted for stability.
NodeId softmax_channels(Tape& tape, NodeId logits);

NodeId sum(Tape& tape, NodeId x);
NodeId scale(Tape& tape, NodeId x, double factor);
NodeId add(Tape& tape, NodeId a, NodeId b);

/// Mean voxel-wise cross-entropy straight from logits (log-sum-exp form).
/// logits [K+1, ...spatial], labels flat per voxel in 0..K.
NodeId cross_entropy_with_logits(Tape& tape, NodeId logits, std::vector<std::uint8_t> labels);

/// Negative Pearson correlation between two equally-shaped feature maps,
/// denominator guarded by eps, clamped to [-1, 1].
NodeId pairing_loss(Tape& tape, NodeId f1, NodeId f2, double eps);

}  // namespace hpn::op

namespace hpn {

/// Value-level softmax used by inference (same math as the tape op).
Tensor softmax_channels_values(const Tensor& logits);

}  // namespace hpn
