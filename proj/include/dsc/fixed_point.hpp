// fixed_point.hpp: Q8.16 scalars and the fused Non-Conv affine stage
// =============================================================================
//
// Between the DWC and PWC engines, dequantization, batch normalization, ReLU
// and requantization collapse into  y = k·x + b  with k, b in signed Q8.16
// (24-bit raw, 16 fractional bits). The accumulator x is a raw integer
// convolution sum; y is an unsigned 8-bit activation.
//
// Rounding is half-away-from-zero everywhere. Out-of-range k/b saturate and
// raise the `saturated` flag rather than failing.
//
// =============================================================================
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dsc {

struct QFixed {
    static constexpr int kFracBits = 16;
    static constexpr int kTotalBits = 24;
    static constexpr std::int32_t kOne = std::int32_t{1} << kFracBits;
    static constexpr std::int32_t kRawMax = (std::int32_t{1} << (kTotalBits - 1)) - 1;
    static constexpr std::int32_t kRawMin = -(std::int32_t{1} << (kTotalBits - 1));

    std::int32_t raw = 0;

    double value() const { return static_cast<double>(raw) / kOne; }
    bool operator==(const QFixed&) const = default;
};

struct FixedConversion {
    QFixed q;
    bool saturated = false;
};

/// round(x·2^16) half away from zero, saturated to 24 bits. NaN throws
/// std::invalid_argument.
FixedConversion to_fixed(double x);

struct BnQuantParams {
    double gamma = 1.0, beta = 0.0, mu = 0.0, sigma_sq = 1.0, epsilon = 1e-5;
    double s_a = 1.0;        // input activation scale
    double s_w = 1.0;        // weight scale
    double s_a_next = 1.0;   // output activation scale
};

struct NonConvParams {
    QFixed k;
    QFixed b;
    bool saturated = false;
};

struct RealAffine {
    double k = 0.0;
    double b = 0.0;
};

/// Unrounded k, b of the folded chain.
RealAffine fold_bn_quant_real(const BnQuantParams& p);

/// Throws std::invalid_argument on non-finite inputs or broken invariants
/// (sigma_sq < 0, epsilon/scales <= 0).
NonConvParams fold_bn_quant(const BnQuantParams& p);

constexpr std::uint8_t kActMax = 255;

/// clamp(round_half_away(max(0, k·x + b)), 0, 255), evaluated in integers.
inline std::uint8_t nonconv_apply(std::int32_t x, const NonConvParams& p) {
    const std::int64_t acc = std::int64_t{p.k.raw} * x + p.b.raw;
    if (acc <= 0) return 0;
    const std::int64_t y = (acc + (std::int64_t{1} << (QFixed::kFracBits - 1))) >> QFixed::kFracBits;
    return static_cast<std::uint8_t>(y > kActMax ? kActMax : y);
}

// --- Non-Conv parameter file ---------------------------------------------------
// Per channel: k.raw then b.raw as little-endian int32 (sign-extended 24-bit).

void write_nonconv_file(const std::filesystem::path& path, std::span<const NonConvParams> params);
/// Throws FormatError on truncated files or raw values outside 24 bits.
std::vector<NonConvParams> read_nonconv_file(const std::filesystem::path& path);

}  // namespace dsc
