#include "dsc/bundle.hpp"

#include <cmath>
#include <string>

namespace dsc {

namespace {

QuantTensor random_weights(Rng& rng, std::vector<std::size_t> dims) {
    QuantTensor t(DType::Wgt8, std::move(dims));
    std::uniform_int_distribution<int> dist(-128, 127);
    for (auto& v : t.data()) v = dist(rng);
    return t;
}

std::string stem(const LayerShape& l) { return "L" + std::to_string(l.index); }

}  // namespace

QuantTensor random_activations(Rng& rng, std::size_t rows, std::size_t cols, std::size_t channels) {
    QuantTensor t(DType::Act8, {rows, cols, channels});
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& v : t.data()) v = dist(rng);
    return t;
}

NonConvParams random_nonconv(Rng& rng) {
    std::uniform_real_distribution<double> log2k(-8.0, 3.0);
    std::uniform_real_distribution<double> bias(-100.0, 100.0);
    std::bernoulli_distribution negative(0.25);
    double k = std::exp2(log2k(rng));
    if (negative(rng)) k = -k;
    const FixedConversion kq = to_fixed(k);
    const FixedConversion bq = to_fixed(bias(rng));
    return {kq.q, bq.q, kq.saturated || bq.saturated};
}

LayerParams random_layer_params(Rng& rng, const LayerShape& l) {
    LayerParams p;
    const auto D = static_cast<std::size_t>(l.D), K = static_cast<std::size_t>(l.K);
    p.dwc_w = random_weights(rng, {3, 3, D});
    p.pwc_w = random_weights(rng, {D, K});
    for (std::size_t i = 0; i < D; ++i) p.dwc_ncv.push_back(random_nonconv(rng));
    for (std::size_t i = 0; i < K; ++i) p.pwc_ncv.push_back(random_nonconv(rng));
    return p;
}

std::vector<LayerParams> random_bundle(Rng& rng, const Network& net) {
    std::vector<LayerParams> out;
    for (const LayerShape& l : net.layers) out.push_back(random_layer_params(rng, l));
    return out;
}

void write_bundle(const std::filesystem::path& dir, const Network& net, const std::vector<LayerParams>& params) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const std::string s = stem(net.layers[i]);
        write_tensor(dir / (s + ".dwc.w"), params.at(i).dwc_w);
        write_tensor(dir / (s + ".pwc.w"), params.at(i).pwc_w);
        write_nonconv_file(dir / (s + ".dwc.ncv"), params.at(i).dwc_ncv);
        write_nonconv_file(dir / (s + ".pwc.ncv"), params.at(i).pwc_ncv);
    }
}

std::vector<LayerParams> load_bundle(const std::filesystem::path& dir, const Network& net) {
    auto require = [](const std::filesystem::path& p) {
        if (!std::filesystem::exists(p)) throw FormatError("missing file " + p.string());
        return p;
    };
    std::vector<LayerParams> out;
    for (const LayerShape& l : net.layers) {
        const std::string s = stem(l);
        LayerParams p;
        p.dwc_w = read_tensor(require(dir / (s + ".dwc.w")));
        p.pwc_w = read_tensor(require(dir / (s + ".pwc.w")));
        p.dwc_ncv = read_nonconv_file(require(dir / (s + ".dwc.ncv")));
        p.pwc_ncv = read_nonconv_file(require(dir / (s + ".pwc.ncv")));
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace dsc
