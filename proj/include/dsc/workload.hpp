// workload.hpp: DSC layer geometry, built-in network, tile-grid derivation
// =============================================================================
//
// A depthwise-separable layer is a 3x3 depthwise convolution over an R×C×D
// ifmap producing N×M×D, followed by a 1×1 pointwise convolution with K
// kernels producing N×M×K. All tensors are channel-last.
//
// Tiling vocabulary:
//   - spatial tile:  T_n×T_m output positions (input window T_r×T_c with halo)
//   - depth group:   T_d consecutive input channels
//   - kernel group:  T_k consecutive PWC kernels
//   - buffer tile:   at most spatial_cap×spatial_cap output positions whose
//                    ifmap fits the on-chip ifmap buffer
//
// =============================================================================
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsc {

/// Raised for malformed input files (network JSON, tensors, parameter files).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when tensor/parameter shapes do not match what an operation needs.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

constexpr int kKernelExtent = 3;

struct LayerShape {
    int index = 0;
    int R = 0, C = 0;   // ifmap rows / cols
    int D = 0;          // input channels
    int H = kKernelExtent, W = kKernelExtent;
    int N = 0, M = 0;   // ofmap rows / cols
    int K = 0;          // PWC kernels
    int stride = 1;
    int pad = 1;
};

/// Output extent of a padded convolution along one axis.
constexpr int conv_out_extent(int in, int kernel, int stride, int pad) {
    return (in + 2 * pad - kernel) / stride + 1;
}

/// Builds a layer with N, M derived from R, C, stride and pad.
LayerShape make_layer(int index, int R, int C, int D, int K, int stride, int pad = 1);

struct Network {
    std::string name;
    std::vector<LayerShape> layers;
};

struct Violation {
    int layer;
    std::string rule;
};

/// Empty result iff every layer and every consecutive pair is well-formed.
std::vector<Violation> validate_network(const Network& net);

/// The 13 DSC layers of MobileNetV1 at 32×32 input (CIFAR-10).
Network builtin_mobilenet_v1_cifar10();

struct MacCounts {
    std::int64_t dwc = 0;
    std::int64_t pwc = 0;

    std::int64_t total() const { return dwc + pwc; }
    /// One multiply plus one add per MAC.
    std::int64_t ops() const { return 2 * total(); }
};

MacCounts layer_mac_counts(const LayerShape& layer);

struct TileConfig {
    int Tn = 2, Tm = 2;
    int Td = 8;
    int Tk = 16;

    int Tr(int stride, int H = kKernelExtent) const { return (Tn - 1) * stride + H; }
    int Tc(int stride, int W = kKernelExtent) const { return (Tm - 1) * stride + W; }

    bool operator==(const TileConfig&) const = default;
};

constexpr TileConfig kNativeTile{};
constexpr int kDefaultSpatialCap = 8;

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

/// Half-open range along one axis.
struct Range {
    int begin = 0;
    int end = 0;
    int extent() const { return end - begin; }
};

/// One T_n×T_m output tile and the input window feeding it.
struct SpatialTile {
    Range out_rows, out_cols;   // clipped to [0,N)×[0,M)
    Range in_rows, in_cols;     // unclipped window, may start below 0
    Range in_rows_clipped, in_cols_clipped;   // window ∩ [0,R)×[0,C)
};

struct BufferTile {
    Range out_rows, out_cols;
    std::vector<SpatialTile> positions;
};

struct TileGrid {
    std::int64_t positions_per_buffer_tile = 0;   // for a full-size buffer tile
    std::int64_t n_buf = 0;
    std::int64_t depth_groups = 0;
    std::int64_t kernel_groups = 0;
    std::vector<BufferTile> buffer_tiles;
};

/// Throws std::invalid_argument if spatial_cap < T_n/T_m or is not a multiple
/// of them.
TileGrid derive_tile_grid(const LayerShape& layer, const TileConfig& cfg = kNativeTile,
                          int spatial_cap = kDefaultSpatialCap);

// --- network file --------------------------------------------------------------

/// Parses `{ "name", "layers": [ {R, C, D, K, stride, pad} ] }`. Unknown or
/// missing fields raise FormatError.
Network parse_network_json(const std::string& text);
Network load_network(const std::filesystem::path& path);
std::string network_to_json(const Network& net);

}  // namespace dsc
