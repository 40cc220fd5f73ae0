// reference.hpp: naive ground-truth implementations
//
// Nothing here shares code with the engine model: convolutions are direct
// loops over padded coordinates, and the Non-Conv oracle works by exact
// integer division instead of shifts.
#pragma once

#include <cstdint>

#include "dsc/engine.hpp"
#include "dsc/fixed_point.hpp"
#include "dsc/tensor.hpp"

namespace dsc::ref {

/// Depthwise 3×3 convolution with zero padding: act8 [R×C×D] → acc32 [N×M×D].
QuantTensor dwc(const QuantTensor& ifmap, const QuantTensor& weights, int stride, int pad);

/// Pointwise convolution: act8 [N×M×D] × wgt8 [D×K] → acc32 [N×M×K].
QuantTensor pwc(const QuantTensor& act, const QuantTensor& weights);

/// Dequant → BN → ReLU → quant in double precision.
std::uint8_t chain_real(std::int32_t x, const BnQuantParams& p);

/// Exact rational evaluation of (k.raw·x + b.raw) / 2^16 with ReLU,
/// half-away rounding and clamping to [0, 255].
std::uint8_t nonconv_exact(std::int32_t x, const NonConvParams& p);

/// Applies nonconv_exact per channel (last axis) of an acc32 tensor.
QuantTensor nonconv_exact(const QuantTensor& acc, const std::vector<NonConvParams>& per_channel);

/// Whole DSC layer: dwc → Non-Conv → pwc → Non-Conv.
QuantTensor layer(const LayerShape& layer, const QuantTensor& ifmap, const LayerParams& params);

}  // namespace dsc::ref
