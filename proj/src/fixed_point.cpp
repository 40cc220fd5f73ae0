#include "dsc/fixed_point.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "dsc/workload.hpp"

namespace dsc {

FixedConversion to_fixed(double x) {
    if (std::isnan(x)) throw std::invalid_argument("to_fixed: NaN");
    const double scaled = std::round(x * QFixed::kOne);
    if (scaled > QFixed::kRawMax) return {{QFixed::kRawMax}, true};
    if (scaled < QFixed::kRawMin) return {{QFixed::kRawMin}, true};
    return {{static_cast<std::int32_t>(scaled)}, false};
}

RealAffine fold_bn_quant_real(const BnQuantParams& p) {
    for (double v : {p.gamma, p.beta, p.mu, p.sigma_sq, p.epsilon, p.s_a, p.s_w, p.s_a_next})
        if (!std::isfinite(v)) throw std::invalid_argument("fold_bn_quant: non-finite parameter");
    if (p.sigma_sq < 0.0) throw std::invalid_argument("fold_bn_quant: sigma_sq < 0");
    if (p.epsilon <= 0.0) throw std::invalid_argument("fold_bn_quant: epsilon <= 0");
    if (p.s_a <= 0.0 || p.s_w <= 0.0 || p.s_a_next <= 0.0)
        throw std::invalid_argument("fold_bn_quant: scales must be positive");

    const double sigma_hat = std::sqrt(p.sigma_sq + p.epsilon);
    return {(p.gamma * p.s_a * p.s_w) / (sigma_hat * p.s_a_next),
            (p.beta - p.gamma * p.mu / sigma_hat) / p.s_a_next};
}

NonConvParams fold_bn_quant(const BnQuantParams& p) {
    const RealAffine r = fold_bn_quant_real(p);
    const FixedConversion k = to_fixed(r.k);
    const FixedConversion b = to_fixed(r.b);
    return {k.q, b.q, k.saturated || b.saturated};
}

namespace {

void put_i32(std::ostream& out, std::int32_t v) {
    const auto u = static_cast<std::uint32_t>(v);
    const char bytes[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                           static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::int32_t get_i32(const unsigned char* p) {
    const std::uint32_t u = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                            (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
    return static_cast<std::int32_t>(u);
}

}  // namespace

void write_nonconv_file(const std::filesystem::path& path, std::span<const NonConvParams> params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const NonConvParams& p : params) {
        put_i32(out, p.k.raw);
        put_i32(out, p.b.raw);
    }
}

std::vector<NonConvParams> read_nonconv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open Non-Conv file " + path.string());
    const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), {}};
    if (bytes.size() % 8 != 0)
        throw FormatError(path.string() + ": size " + std::to_string(bytes.size()) +
                          " is not a multiple of 8");

    auto in_range = [](std::int32_t raw) { return raw >= QFixed::kRawMin && raw <= QFixed::kRawMax; };
    std::vector<NonConvParams> out;
    out.reserve(bytes.size() / 8);
    for (std::size_t off = 0; off < bytes.size(); off += 8) {
        NonConvParams p;
        p.k.raw = get_i32(&bytes[off]);
        p.b.raw = get_i32(&bytes[off + 4]);
        if (!in_range(p.k.raw) || !in_range(p.b.raw))
            throw FormatError(path.string() + ": channel " + std::to_string(off / 8) +
                              " holds a value outside the 24-bit range");
        out.push_back(p);
    }
    return out;
}

}  // namespace dsc
