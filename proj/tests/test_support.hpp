// Shared helpers for the test binaries.
#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dsc/fixed_point.hpp"
#include "dsc/tensor.hpp"

namespace dsc::testing {

/// BN/quant parameters constructed so the folded k has magnitude in
/// [2^-8, 8] and b lies in [-100, 100].
inline BnQuantParams random_bn_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> log2k(-8.0, 3.0), bias(-100.0, 100.0), unit(0.0, 1.0);
    BnQuantParams p;
    p.s_a = 0.005 + 0.1 * unit(rng);
    p.s_w = 0.001 + 0.05 * unit(rng);
    p.s_a_next = 0.01 + 0.2 * unit(rng);
    p.mu = 4.0 * unit(rng) - 2.0;
    p.sigma_sq = 0.01 + 4.0 * unit(rng);
    p.epsilon = 1e-5;
    const double sigma_hat = std::sqrt(p.sigma_sq + p.epsilon);
    double k = std::exp2(log2k(rng));
    if (unit(rng) < 0.25) k = -k;
    p.gamma = k * sigma_hat * p.s_a_next / (p.s_a * p.s_w);
    p.beta = bias(rng) * p.s_a_next + p.gamma * p.mu / sigma_hat;
    return p;
}

inline std::size_t sz_t(int v) { return static_cast<std::size_t>(v); }

inline QuantTensor random_weights(std::mt19937_64& rng, std::vector<std::size_t> dims) {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    std::uniform_int_distribution<int> v(-128, 127);
    std::vector<std::int32_t> data(n);
    for (auto& x : data) x = v(rng);
    return QuantTensor(DType::Wgt8, std::move(dims), std::move(data));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dscsim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace dsc::testing
