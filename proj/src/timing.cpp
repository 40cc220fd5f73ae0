#include "dsc/timing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace dsc {

std::int64_t tile_latency(int n_t, int m_t, int K, const TileConfig& tile) {
    return kInitiationCycles + ceil_div(n_t, tile.Tn) * ceil_div(m_t, tile.Tm) * ceil_div(K, tile.Tk);
}

LayerTiming layer_latency(const LayerShape& l, const TimingConfig& cfg) {
    if (cfg.period_ns <= 0.0) throw std::invalid_argument("clock period must be positive");
    const int n_t = std::min(l.N, cfg.spatial_cap);
    const int m_t = std::min(l.M, cfg.spatial_cap);

    LayerTiming t;
    t.index = l.index;
    t.lat_tile = tile_latency(n_t, m_t, l.K, cfg.tile);
    t.n_buf = ceil_div(l.N, cfg.spatial_cap) * ceil_div(l.M, cfg.spatial_cap);
    t.depth_groups = ceil_div(l.D, cfg.tile.Td);
    t.total_cycles = t.lat_tile * t.n_buf * t.depth_groups;
    t.total_ns = static_cast<double>(t.total_cycles) * cfg.period_ns;
    t.ops = layer_mac_counts(l).ops();
    t.throughput_gops = t.total_ns > 0 ? static_cast<double>(t.ops) / t.total_ns : 0.0;

    const std::int64_t positions = ceil_div(n_t, cfg.tile.Tn) * ceil_div(m_t, cfg.tile.Tm);
    const std::int64_t segments = t.n_buf * t.depth_groups;
    if (t.total_cycles > 0) {
        t.dwc_utilization = static_cast<double>(positions * segments) / static_cast<double>(t.total_cycles);
        t.pwc_utilization = static_cast<double>(positions * ceil_div(l.K, cfg.tile.Tk) * segments) /
                            static_cast<double>(t.total_cycles);
    }
    return t;
}

NetworkTiming network_timing(const Network& net, const TimingConfig& cfg) {
    NetworkTiming nt;
    std::int64_t ops = 0;
    for (const LayerShape& l : net.layers) {
        nt.layers.push_back(layer_latency(l, cfg));
        const LayerTiming& t = nt.layers.back();
        nt.total_ns += t.total_ns;
        nt.total_cycles += t.total_cycles;
        nt.mean_gops += t.throughput_gops;
        ops += t.ops;
    }
    if (!nt.layers.empty()) nt.mean_gops /= static_cast<double>(nt.layers.size());
    if (nt.total_ns > 0) nt.weighted_gops = static_cast<double>(ops) / nt.total_ns;
    return nt;
}

TraceCheck check_trace(const LayerShape& layer, const TimingConfig& model, const CycleTrace& trace) {
    TraceCheck c;
    c.model_cycles = layer_latency(layer, model).total_cycles;
    c.trace_cycles = trace.total_cycles();
    c.first_pwc_cycle = trace.first_pwc_cycle().value_or(-1);
    if (c.model_cycles != c.trace_cycles) {
        c.detail = "layer " + std::to_string(layer.index) + ": model " + std::to_string(c.model_cycles) +
                   " cycles, trace " + std::to_string(c.trace_cycles);
    } else if (c.first_pwc_cycle != kInitiationCycles) {
        c.detail = "layer " + std::to_string(layer.index) + ": first PWC output at cycle " +
                   std::to_string(c.first_pwc_cycle);
    } else {
        c.ok = true;
    }
    return c;
}

std::string timing_to_json(const NetworkTiming& t) {
    nlohmann::ordered_json doc;
    doc["layers"] = nlohmann::ordered_json::array();
    for (const LayerTiming& l : t.layers) {
        doc["layers"].push_back({{"index", l.index},
                                 {"cycles", l.total_cycles},
                                 {"ns", l.total_ns},
                                 {"ops", l.ops},
                                 {"gops", l.throughput_gops},
                                 {"dwc_util", l.dwc_utilization},
                                 {"pwc_util", l.pwc_utilization}});
    }
    doc["mean_gops"] = t.mean_gops;
    doc["weighted_gops"] = t.weighted_gops;
    doc["total_ns"] = t.total_ns;
    return doc.dump(2) + "\n";
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;   // ties share the mean rank
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman_rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

}  // namespace dsc
