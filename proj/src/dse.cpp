#include "dsc/dse.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace dsc {

const char* loop_order_name(LoopOrder o) { return o == LoopOrder::La ? "La" : "Lb"; }

std::string SweepPoint::label() const {
    return std::string(loop_order_name(order)) + " Tn=Tm=" + std::to_string(Tn) + " case" +
           std::to_string(case_id) + " (Td=" + std::to_string(Td()) + ", Tk=" + std::to_string(Tk()) + ")";
}

std::vector<SweepPoint> all_sweep_points() {
    std::vector<SweepPoint> pts;
    for (LoopOrder o : {LoopOrder::La, LoopOrder::Lb})
        for (int tn : {1, 2})
            for (int c = 1; c <= static_cast<int>(kTileCases.size()); ++c) pts.push_back({o, tn, c});
    return pts;
}

PeArray pe_array_size(const SweepPoint& pt) {
    const std::int64_t spatial = std::int64_t{pt.Tn} * pt.Tn;
    return {std::int64_t{pt.Td()} * kKernelExtent * kKernelExtent * spatial, std::int64_t{pt.Td()} * pt.Tk() * spatial};
}

AccessRow access_counts(const LayerShape& l, const SweepPoint& pt) {
    const TileConfig t = pt.tile();
    const std::int64_t tiles = ceil_div(l.N, t.Tn) * ceil_div(l.M, t.Tm);
    const std::int64_t nm = std::int64_t{l.N} * l.M;
    const std::int64_t window = std::int64_t{t.Tr(l.stride, l.H)} * t.Tc(l.stride, l.W);

    AccessRow row;
    row.layer = l.index;
    row.dwc_act = window * l.D * tiles;
    row.pwc_act = nm * l.D * ceil_div(l.K, t.Tk);
    if (pt.order == LoopOrder::La) {
        row.dwc_wgt = std::int64_t{l.H} * l.W * l.D;
        row.pwc_wgt = std::int64_t{l.D} * l.K;
        row.psum = nm * l.K * std::max<std::int64_t>(ceil_div(l.D, t.Td) - 1, 0);
    } else {
        row.dwc_wgt = std::int64_t{l.H} * l.W * l.D * tiles;
        row.pwc_wgt = std::int64_t{l.D} * l.K * tiles;
        row.psum = 0;
    }
    const PeArray pe = pe_array_size(pt);
    row.pe_dwc = pe.dwc;
    row.pe_pwc = pe.pwc;
    return row;
}

AccessReport network_access_report(const Network& net, const SweepPoint& pt) {
    AccessReport rep;
    rep.point = pt;
    const PeArray pe = pe_array_size(pt);
    rep.total.pe_dwc = pe.dwc;
    rep.total.pe_pwc = pe.pwc;
    for (const LayerShape& l : net.layers) {
        AccessRow r = access_counts(l, pt);
        rep.total.dwc_act += r.dwc_act;
        rep.total.dwc_wgt += r.dwc_wgt;
        rep.total.pwc_act += r.pwc_act;
        rep.total.pwc_wgt += r.pwc_wgt;
        rep.total.psum += r.psum;
        rep.layers.push_back(r);
    }
    return rep;
}

ReductionConvention parse_convention(const std::string& s) {
    if (s == "raw") return ReductionConvention::Raw;
    if (s == "tableII") return ReductionConvention::TableII;
    throw std::invalid_argument("unknown reduction convention '" + s + "' (expected raw or tableII)");
}

const char* convention_name(ReductionConvention c) { return c == ReductionConvention::Raw ? "raw" : "tableII"; }

ReductionReport intermediate_reduction(const Network& net, ReductionConvention convention) {
    ReductionReport rep{convention, {}, {}};
    for (const LayerShape& l : net.layers) {
        const std::int64_t in = std::int64_t{l.R} * l.C * l.D;
        const std::int64_t mid = std::int64_t{l.N} * l.M * l.D;
        const std::int64_t out = std::int64_t{l.N} * l.M * l.K;
        ReductionRow r;
        r.layer = l.index;
        if (convention == ReductionConvention::Raw) {
            // DWC in + intermediate written and read back + PWC out.
            r.baseline = in + 2 * mid + out;
            r.proposed = in + out;
        } else {
            const AccessRow a = access_counts(l, kNativePoint);
            r.baseline = a.dwc_act + mid + a.pwc_act + out;
            r.proposed = a.dwc_act + out;
        }
        rep.total.baseline += r.baseline;
        rep.total.proposed += r.proposed;
        rep.layers.push_back(r);
    }
    return rep;
}

std::vector<RankedPoint> rank_configs(const Network& net, const std::vector<SweepPoint>& points) {
    std::vector<RankedPoint> ranked;
    for (const SweepPoint& pt : points)
        ranked.push_back({pt, network_access_report(net, pt).total.total(), pe_array_size(pt).total()});
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedPoint& a, const RankedPoint& b) {
        if (a.total_access != b.total_access) return a.total_access < b.total_access;
        if (a.pe_total != b.pe_total) return a.pe_total < b.pe_total;
        return a.point.case_id < b.point.case_id;
    });
    return ranked;
}

void write_dse_csv(std::ostream& out, const std::vector<AccessReport>& reports) {
    out << "order,Tn,Tm,Td,Tk,layer,dwc_act,dwc_wgt,pwc_act,pwc_wgt,psum,pe_dwc,pe_pwc\n";
    auto row = [&](const SweepPoint& pt, const std::string& layer, const AccessRow& r) {
        out << loop_order_name(pt.order) << ',' << pt.Tn << ',' << pt.Tn << ',' << pt.Td() << ',' << pt.Tk() << ','
            << layer << ',' << r.dwc_act << ',' << r.dwc_wgt << ',' << r.pwc_act << ',' << r.pwc_wgt << ','
            << r.psum << ',' << r.pe_dwc << ',' << r.pe_pwc << '\n';
    };
    for (const AccessReport& rep : reports) {
        for (const AccessRow& r : rep.layers) row(rep.point, std::to_string(r.layer), r);
        row(rep.point, "total", rep.total);
    }
}

void write_reduction_csv(std::ostream& out, const std::vector<ReductionReport>& reports) {
    out << "convention,layer,baseline,proposed,reduction_pct\n";
    auto row = [&](ReductionConvention c, const std::string& layer, const ReductionRow& r) {
        out << convention_name(c) << ',' << layer << ',' << r.baseline << ',' << r.proposed << ',' << std::fixed
            << std::setprecision(2) << 100.0 * r.reduction() << '\n';
        out.unsetf(std::ios::floatfield);
    };
    for (const ReductionReport& rep : reports) {
        for (const ReductionRow& r : rep.layers) row(rep.convention, std::to_string(r.layer), r);
        row(rep.convention, "total", rep.total);
    }
}

}  // namespace dsc
