#include "dsc/reference.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsc::ref {

QuantTensor dwc(const QuantTensor& ifmap, const QuantTensor& weights, int stride, int pad) {
    if (ifmap.ndim() != 3 || weights.ndim() != 3 || weights.dim(0) != 3 || weights.dim(1) != 3 ||
        weights.dim(2) != ifmap.dim(2))
        throw ShapeError("ref::dwc: shape mismatch");
    if (stride < 1) throw ShapeError("ref::dwc: stride must be positive");

    const long R = static_cast<long>(ifmap.dim(0)), C = static_cast<long>(ifmap.dim(1));
    const long D = static_cast<long>(ifmap.dim(2));
    const long N = (R + 2 * pad - 3) / stride + 1, M = (C + 2 * pad - 3) / stride + 1;
    QuantTensor out(DType::Acc32, {static_cast<std::size_t>(N), static_cast<std::size_t>(M),
                                   static_cast<std::size_t>(D)});
    for (long d = 0; d < D; ++d)
        for (long n = 0; n < N; ++n)
            for (long m = 0; m < M; ++m) {
                std::int64_t sum = 0;
                for (long h = 0; h < 3; ++h)
                    for (long w = 0; w < 3; ++w) {
                        const long r = n * stride + h - pad, c = m * stride + w - pad;
                        if (r < 0 || r >= R || c < 0 || c >= C) continue;
                        sum += std::int64_t{ifmap.at(r, c, d)} * weights.at(h, w, d);
                    }
                out.at(n, m, d) = static_cast<std::int32_t>(sum);
            }
    return out;
}

QuantTensor pwc(const QuantTensor& act, const QuantTensor& weights) {
    if (act.ndim() != 3 || weights.ndim() != 2 || weights.dim(0) != act.dim(2))
        throw ShapeError("ref::pwc: shape mismatch");
    const std::size_t N = act.dim(0), M = act.dim(1), D = act.dim(2), K = weights.dim(1);
    QuantTensor out(DType::Acc32, {N, M, K});
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t k = 0; k < K; ++k) {
                std::int64_t sum = 0;
                for (std::size_t d = 0; d < D; ++d) sum += std::int64_t{act.at(n, m, d)} * weights.at(d, k);
                out.at(n, m, k) = static_cast<std::int32_t>(sum);
            }
    return out;
}

namespace {

std::int64_t round_half_away(double v) {
    return static_cast<std::int64_t>(v < 0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5));
}

}  // namespace

std::uint8_t chain_real(std::int32_t x, const BnQuantParams& p) {
    for (double v : {p.gamma, p.beta, p.mu, p.sigma_sq, p.epsilon, p.s_a, p.s_w, p.s_a_next})
        if (!std::isfinite(v)) throw std::invalid_argument("ref::chain_real: non-finite parameter");
    const double x_real = p.s_a * p.s_w * static_cast<double>(x);
    const double bn = p.gamma * (x_real - p.mu) / std::sqrt(p.sigma_sq + p.epsilon) + p.beta;
    const double relu = bn > 0.0 ? bn : 0.0;
    const std::int64_t q = round_half_away(relu / p.s_a_next);
    return static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
}

std::uint8_t nonconv_exact(std::int32_t x, const NonConvParams& p) {
    // |k.raw·x| < 2^54: exact in 64 bits.
    const std::int64_t num = std::int64_t{p.k.raw} * x + p.b.raw;
    if (num <= 0) return 0;
    constexpr std::int64_t den = 65536;
    std::int64_t q = num / den;
    const std::int64_t r = num % den;
    if (2 * r >= den) ++q;   // remainder >= 1/2 rounds away from zero
    return static_cast<std::uint8_t>(q > 255 ? 255 : q);
}

QuantTensor nonconv_exact(const QuantTensor& acc, const std::vector<NonConvParams>& per_channel) {
    const std::size_t channels = acc.dim(acc.ndim() - 1);
    if (per_channel.size() != channels) throw ShapeError("ref::nonconv_exact: parameter count mismatch");
    QuantTensor out(DType::Act8, acc.dims());
    for (std::size_t i = 0; i < acc.size(); ++i) out.data()[i] = nonconv_exact(acc.data()[i], per_channel[i % channels]);
    return out;
}

QuantTensor layer(const LayerShape& l, const QuantTensor& ifmap, const LayerParams& params) {
    const QuantTensor mid = nonconv_exact(dwc(ifmap, params.dwc_w, l.stride, l.pad), params.dwc_ncv);
    return nonconv_exact(pwc(mid, params.pwc_w), params.pwc_ncv);
}

}  // namespace dsc::ref
