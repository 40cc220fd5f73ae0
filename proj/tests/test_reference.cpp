#include <algorithm>
#include <cstdlib>
#include <limits>
#include <random>

#include "doctest.h"
#include "dsc/bundle.hpp"
#include "dsc/engine.hpp"
#include "dsc/reference.hpp"

using namespace dsc;

TEST_CASE("ref::dwc with delta kernels is the identity map") {
    Rng rng(1);
    const QuantTensor in = random_activations(rng, 5, 7, 3);
    QuantTensor w(DType::Wgt8, {3, 3, 3});
    for (std::size_t d = 0; d < 3; ++d) w.at(1, 1, d) = 1;
    const QuantTensor out = ref::dwc(in, w, 1, 1);
    REQUIRE(out.dims() == std::vector<std::size_t>{5, 7, 3});
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(out.data()[i] == in.data()[i]);

    const QuantTensor s2 = ref::dwc(in, w, 2, 1);
    REQUIRE(s2.dims() == std::vector<std::size_t>{3, 4, 3});
    CHECK(s2.at(2, 3, 1) == in.at(4, 6, 1));
}

TEST_CASE("ref::dwc on a 1x1 padded input uses only the centre tap") {
    QuantTensor in(DType::Act8, {1, 1, 1}, {200});
    QuantTensor w(DType::Wgt8, {3, 3, 1}, {1, 2, 3, 4, -5, 6, 7, 8, 9});
    const QuantTensor out = ref::dwc(in, w, 1, 1);
    REQUIRE(out.size() == 1);
    CHECK(out.data()[0] == -1000);
}

TEST_CASE("ref::pwc selector and sum weights") {
    Rng rng(2);
    const QuantTensor act = random_activations(rng, 3, 4, 5);

    QuantTensor ones(DType::Wgt8, {5, 1}, std::vector<std::int32_t>(5, 1));
    const QuantTensor sum = ref::pwc(act, ones);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 4; ++c) {
            std::int32_t s = 0;
            for (std::size_t d = 0; d < 5; ++d) s += act.at(r, c, d);
            CHECK(sum.at(r, c, 0) == s);
        }

    // Reverses the channel order.
    QuantTensor perm(DType::Wgt8, {5, 5});
    for (std::size_t d = 0; d < 5; ++d) perm.at(d, 4 - d) = 1;
    const QuantTensor p = ref::pwc(act, perm);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            for (std::size_t d = 0; d < 5; ++d) CHECK(p.at(r, c, 4 - d) == act.at(r, c, d));

    CHECK_THROWS(ref::pwc(act, QuantTensor(DType::Wgt8, {4, 2})));
    CHECK_THROWS(ref::dwc(act, QuantTensor(DType::Wgt8, {3, 3, 4}), 1, 1));
}

TEST_CASE("ref::chain_real examples") {
    BnQuantParams id;
    id.sigma_sq = 1.0 - 1e-5;
    CHECK(ref::chain_real(42, id) == 42);
    CHECK(ref::chain_real(1000, id) == 255);
    CHECK(ref::chain_real(-3, id) == 0);

    const BnQuantParams ex{0.5, 0.25, 1.0, 0.9975, 0.0025, 0.1, 0.1, 0.02};
    CHECK(ref::chain_real(100, ex) == 13);
    CHECK(ref::chain_real(10, ex) == 0);

    BnQuantParams bad = id;
    bad.gamma = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(ref::chain_real(1, bad));
}

TEST_CASE("ref::nonconv_exact examples") {
    const NonConvParams id{{65536}, {0}, false};
    for (std::int32_t x = -300; x <= 300; ++x)
        CHECK(ref::nonconv_exact(x, id) == std::clamp(x, 0, 255));

    const NonConvParams floor{{1}, {QFixed::kRawMin}, false};
    for (std::int32_t x = -1000; x < (1 << 23); x += 4099) CHECK(ref::nonconv_exact(x, floor) == 0);
}

TEST_CASE("chain_real and nonconv_exact(fold) differ by at most one step") {
    Rng rng(17);
    std::uniform_int_distribution<std::int32_t> xs(-(1 << 15), 1 << 15);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 3000; ++t) {
        BnQuantParams p;
        p.s_a = 0.01 + u(rng);
        p.s_w = 0.01 + u(rng);
        p.s_a_next = 0.05 + u(rng);
        p.mu = u(rng) * 4 - 2;
        p.sigma_sq = 0.05 + u(rng);
        p.gamma = (u(rng) * 2 - 1) * 4;
        p.beta = (u(rng) * 2 - 1) * 8;
        const RealAffine r = fold_bn_quant_real(p);
        if (std::abs(r.k) > 8 || std::abs(r.b) > 127) continue;
        const NonConvParams f = fold_bn_quant(p);
        for (int i = 0; i < 50; ++i) {
            const std::int32_t x = xs(rng);
            REQUIRE(std::abs(int{ref::chain_real(x, p)} - int{ref::nonconv_exact(x, f)}) <= 1);
        }
    }
}

TEST_CASE("random 6x6x4 layer: engine tiled path equals the oracle") {
    for (int stride : {1, 2}) {
        for (int seed = 0; seed < 10; ++seed) {
            Rng rng(static_cast<std::uint64_t>(100 + seed));
            const LayerShape l = make_layer(0, 6, 6, 4, 5, stride);
            const QuantTensor in = random_activations(rng, 6, 6, 4);
            const LayerParams p = random_layer_params(rng, l);
            const QuantTensor expect = ref::layer(l, in, p);
            const LayerRun run = run_layer_fused(l, in, p);
            const auto m = first_mismatch(run.ofmap, expect);
            if (m) FAIL(m->describe());
        }
    }
}
