#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "dsc/dse.hpp"

using namespace dsc;

TEST_CASE("PE array sizes") {
    const PeArray native = pe_array_size(kNativePoint);
    CHECK(native.dwc == 288);
    CHECK(native.pwc == 512);
    CHECK(native.total() == 800);

    const PeArray small = pe_array_size({LoopOrder::La, 1, 1});
    CHECK(small.dwc == 36);
    CHECK(small.pwc == 16);

    // Linear in T_d, T_k and T_n·T_m.
    const PeArray c1 = pe_array_size({LoopOrder::La, 2, 1});   // (4, 4)
    const PeArray c4 = pe_array_size({LoopOrder::La, 2, 4});   // (8, 4)
    const PeArray c2 = pe_array_size({LoopOrder::La, 2, 2});   // (4, 8)
    CHECK(c4.dwc == 2 * c1.dwc);
    CHECK(c4.pwc == 2 * c1.pwc);
    CHECK(c2.dwc == c1.dwc);
    CHECK(c2.pwc == 2 * c1.pwc);
    CHECK(c1.dwc == 4 * pe_array_size({LoopOrder::La, 1, 1}).dwc);
    CHECK(pe_array_size({LoopOrder::Lb, 2, 6}).total() == 800);
}

TEST_CASE("sweep grid") {
    const auto pts = all_sweep_points();
    CHECK(pts.size() == 24);
    std::set<std::string> labels;
    for (const auto& p : pts) labels.insert(p.label());
    CHECK(labels.size() == 24);
    CHECK(kTileCases[5].Td == 8);
    CHECK(kTileCases[5].Tk == 16);
    CHECK(kTileCases[0].Td == 4);
    CHECK(kTileCases[0].Tk == 4);
}

TEST_CASE("access_counts closed forms") {
    const Network net = builtin_mobilenet_v1_cifar10();
    const AccessRow l12 = access_counts(net.layers[12], kNativePoint);
    CHECK(l12.dwc_act == 16384);
    CHECK(l12.dwc_wgt == 9216);
    CHECK(l12.pwc_act == 262144);
    CHECK(l12.pwc_wgt == 1048576);
    CHECK(l12.psum == 2 * 2 * 1024 * 127);
    CHECK(l12.pe_dwc == 288);
    CHECK(l12.pe_pwc == 512);

    for (const LayerShape& l : net.layers)
        for (int tn : {1, 2})
            for (int c = 1; c <= 6; ++c) {
                const AccessRow a = access_counts(l, {LoopOrder::La, tn, c});
                const AccessRow b = access_counts(l, {LoopOrder::Lb, tn, c});
                const std::int64_t tiles = ceil_div(l.N, tn) * ceil_div(l.M, tn);
                CHECK(b.pwc_wgt == a.pwc_wgt * tiles);
                CHECK(b.dwc_wgt == a.dwc_wgt * tiles);
                CHECK(b.dwc_act == a.dwc_act);
                CHECK(b.pwc_act == a.pwc_act);
                CHECK(b.psum == 0);
            }
}

TEST_CASE("degenerate spatial loop: La and Lb coincide when one depth tile covers D") {
    for (int c : {1, 6}) {
        const int td = kTileCases[static_cast<std::size_t>(c - 1)].Td;
        const LayerShape l = make_layer(0, 1, 1, td, 24, 1);
        const AccessRow a = access_counts(l, {LoopOrder::La, 1, c});
        const AccessRow b = access_counts(l, {LoopOrder::Lb, 1, c});
        CHECK(a.dwc_act == b.dwc_act);
        CHECK(a.dwc_wgt == b.dwc_wgt);
        CHECK(a.pwc_act == b.pwc_act);
        CHECK(a.pwc_wgt == b.pwc_wgt);
        CHECK(a.psum == b.psum);
    }
    // With more depth tiles the La psum revisits remain.
    const LayerShape deep = make_layer(0, 1, 1, 32, 24, 1);
    CHECK(access_counts(deep, {LoopOrder::La, 1, 6}).psum > 0);
    CHECK(access_counts(deep, {LoopOrder::Lb, 1, 6}).weight() == access_counts(deep, {LoopOrder::La, 1, 6}).weight());
}

TEST_CASE("network totals and La/Lb orderings") {
    const Network net = builtin_mobilenet_v1_cifar10();
    for (int tn : {1, 2})
        for (int c = 1; c <= 6; ++c) {
            const AccessReport a = network_access_report(net, {LoopOrder::La, tn, c});
            const AccessReport b = network_access_report(net, {LoopOrder::Lb, tn, c});
            CHECK(b.total.weight() >= a.total.weight());
            CHECK(a.total.activation() >= b.total.activation());

            AccessRow sum;
            for (const AccessRow& r : a.layers) {
                sum.dwc_act += r.dwc_act;
                sum.dwc_wgt += r.dwc_wgt;
                sum.pwc_act += r.pwc_act;
                sum.pwc_wgt += r.pwc_wgt;
                sum.psum += r.psum;
            }
            CHECK(sum.total() == a.total.total());
            CHECK(sum.psum == a.total.psum);
            CHECK(a.total.layer == -1);
        }
}

TEST_CASE("doubling K leaves DWC columns unchanged") {
    const Network net = builtin_mobilenet_v1_cifar10();
    Network wide = net;
    for (LayerShape& l : wide.layers) l.K *= 2;
    for (const SweepPoint& pt : all_sweep_points()) {
        const AccessReport a = network_access_report(net, pt);
        const AccessReport b = network_access_report(wide, pt);
        for (std::size_t i = 0; i < a.layers.size(); ++i) {
            CHECK(a.layers[i].dwc_act == b.layers[i].dwc_act);
            CHECK(a.layers[i].dwc_wgt == b.layers[i].dwc_wgt);
        }
    }
}

TEST_CASE("rank_configs") {
    const Network net = builtin_mobilenet_v1_cifar10();
    const auto ranked = rank_configs(net);
    REQUIRE(ranked.size() == 24);
    CHECK(ranked.front().point == kNativePoint);
    CHECK(ranked.front().total_access == 11920480);
    CHECK(ranked.front().pe_total == 800);

    std::set<std::string> seen;
    for (const auto& r : ranked) seen.insert(r.point.label());
    CHECK(seen.size() == 24);
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        CHECK(ranked[i - 1].total_access <= ranked[i].total_access);
        CHECK(ranked[i].total_access == network_access_report(net, ranked[i].point).total.total());
    }
}

TEST_CASE("intermediate reduction") {
    const Network net = builtin_mobilenet_v1_cifar10();

    // Independent oracle: sum the tensor sizes directly.
    std::int64_t in_out = 0, inter = 0;
    for (const LayerShape& l : net.layers) {
        in_out += std::int64_t{l.R} * l.C * l.D + std::int64_t{l.N} * l.M * l.K;
        inter += 2 * std::int64_t{l.N} * l.M * l.D;
    }
    CHECK(in_out + inter == 786432);
    CHECK(inter == 315392);

    const ReductionReport raw = intermediate_reduction(net, ReductionConvention::Raw);
    CHECK(raw.total.baseline == in_out + inter);
    CHECK(raw.total.proposed == in_out);
    CHECK(raw.total.reduction() == doctest::Approx(static_cast<double>(inter) / (in_out + inter)));
    CHECK(std::abs(raw.total.reduction() * 100 - 40.1) <= 0.1);
    CHECK(raw.layers[12].reduction() == doctest::Approx(0.5));

    const ReductionReport t2 = intermediate_reduction(net, ReductionConvention::TableII);
    for (const auto* rep : {&raw, &t2}) {
        REQUIRE(rep->layers.size() == 13);
        for (const ReductionRow& r : rep->layers) {
            CHECK(r.reduction() > 0.0);
            CHECK(r.proposed < r.baseline);
        }
    }

    CHECK(parse_convention("raw") == ReductionConvention::Raw);
    CHECK(parse_convention("tableII") == ReductionConvention::TableII);
    CHECK_THROWS_AS(parse_convention("energy"), std::invalid_argument);
}

TEST_CASE("CSV output") {
    const Network net = builtin_mobilenet_v1_cifar10();
    std::ostringstream dse;
    write_dse_csv(dse, {network_access_report(net, kNativePoint)});
    std::istringstream lines(dse.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header == "order,Tn,Tm,Td,Tk,layer,dwc_act,dwc_wgt,pwc_act,pwc_wgt,psum,pe_dwc,pe_pwc");
    CHECK(first.rfind("La,2,2,8,16,0,", 0) == 0);
    const std::string text = dse.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 13 + 1);

    std::ostringstream red;
    write_reduction_csv(red, {intermediate_reduction(net, ReductionConvention::Raw)});
    CHECK(red.str().rfind("convention,layer,baseline,proposed,reduction_pct\n", 0) == 0);
    CHECK(red.str().find("raw,total,786432,471040,40.10") != std::string::npos);
}
