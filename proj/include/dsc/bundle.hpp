// bundle.hpp: seeded random workloads and on-disk parameter bundles
//
// Bundle directory layout, one set per layer index i:
//   L{i}.dwc.w    wgt8 [3×3×D]      L{i}.dwc.ncv   Non-Conv params, D channels
//   L{i}.pwc.w    wgt8 [D×K]        L{i}.pwc.ncv   Non-Conv params, K channels
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "dsc/engine.hpp"

namespace dsc {

using Rng = std::mt19937_64;

/// act8 uniform in [0, 255].
QuantTensor random_activations(Rng& rng, std::size_t rows, std::size_t cols, std::size_t channels);

/// |k| log-uniform in [2^-8, 8] (negative with probability 1/4), b uniform in
/// [-100, 100], both rounded to Q8.16.
NonConvParams random_nonconv(Rng& rng);

/// Weights uniform in [-128, 127] plus random Non-Conv parameters.
LayerParams random_layer_params(Rng& rng, const LayerShape& layer);

std::vector<LayerParams> random_bundle(Rng& rng, const Network& net);

void write_bundle(const std::filesystem::path& dir, const Network& net, const std::vector<LayerParams>& params);

/// Throws FormatError naming the offending path when a file is missing or
/// malformed, ShapeError when its shape does not fit the layer.
std::vector<LayerParams> load_bundle(const std::filesystem::path& dir, const Network& net);

}  // namespace dsc
