// timing.hpp: analytic latency / throughput model
// =============================================================================
//
//   lat_tile  = 9 + ceil(n_t/T_n) · ceil(m_t/T_m) · ceil(K/T_k)        [cycles]
//   lat_total = lat_tile · n_buf · ceil(D/T_d)
//
// n_t, m_t are the output extents of one buffer tile (min(N, cap)), n_buf the
// number of buffer tiles. Ops count one multiply and one add per MAC.
//
// =============================================================================
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsc/engine.hpp"
#include "dsc/workload.hpp"

namespace dsc {

constexpr std::int64_t kInitiationCycles = 9;

struct TimingConfig {
    TileConfig tile = kNativeTile;
    int spatial_cap = kDefaultSpatialCap;
    double period_ns = 1.0;
};

std::int64_t tile_latency(int n_t, int m_t, int K, const TileConfig& tile = kNativeTile);

struct LayerTiming {
    int index = 0;
    std::int64_t lat_tile = 0;
    std::int64_t n_buf = 0;
    std::int64_t depth_groups = 0;
    std::int64_t total_cycles = 0;
    double total_ns = 0.0;
    std::int64_t ops = 0;
    double throughput_gops = 0.0;
    double dwc_utilization = 0.0;   // fraction of cycles the DWC array fires
    double pwc_utilization = 0.0;   // fraction of cycles the PWC array fires
};

LayerTiming layer_latency(const LayerShape& layer, const TimingConfig& cfg = {});

struct NetworkTiming {
    std::vector<LayerTiming> layers;
    double mean_gops = 0.0;       // unweighted over layers
    double weighted_gops = 0.0;   // Σops / Σns
    double total_ns = 0.0;
    std::int64_t total_cycles = 0;
};

NetworkTiming network_timing(const Network& net, const TimingConfig& cfg = {});

struct TraceCheck {
    bool ok = false;
    std::int64_t model_cycles = 0;
    std::int64_t trace_cycles = 0;
    std::int64_t first_pwc_cycle = -1;
    std::string detail;
};

/// Compares an engine CycleTrace with the model: equal cycle counts and the
/// first PWC activity at cycle 9.
TraceCheck check_trace(const LayerShape& layer, const TimingConfig& model, const CycleTrace& trace);

inline bool crosscheck_trace(const LayerShape& layer, const TimingConfig& model, const CycleTrace& trace) {
    return check_trace(layer, model, trace).ok;
}

/// `{ "layers": [...], "mean_gops", "weighted_gops", "total_ns" }`
std::string timing_to_json(const NetworkTiming& t);

double spearman_rank_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace dsc
