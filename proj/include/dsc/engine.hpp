// engine.hpp: bit-exact model of the dual DWC/PWC engines
// =============================================================================
//
// Geometry (fixed):
//   DWC engine: 8 channels × 3×3 taps × 2×2 outputs  = 288 MAC slots
//   PWC engine: 8 channels × 16 kernels × 2×2 outputs = 512 MAC slots
//
// Fused schedule (loop order La, buffer tiles outermost):
//
//   for buffer tile                      (≤ spatial_cap × spatial_cap outputs)
//     for depth group dg                  (8 channels)
//       for spatial position p            (2×2 outputs)
//         DWC  → Non-Conv → intermediate register slot p%2
//         for kernel group kg             (16 kernels)
//           PWC: psum[p][kg] += act · w[dg][kg]
//     Non-Conv on psums → ofmap
//
// Each (buffer tile, depth group) pair is one pipeline segment of
//   kInitiationCycles + P·G cycles
// where P = positions, G = kernel groups. Within a segment the DWC of
// position p fires at offset kDwcStage + p·G and the PWC of (p, kg) at
// kFirstPwcStage + p·G + kg, so the PWC array is busy every cycle after the
// initiation window.
//
// Counters record element-level traffic:
//   - activation reads are engine-side reads (halo re-reads included)
//   - weight reads are first fetches into the on-chip weight buffers
//   - psum accesses are read-modify-writes on revisited depth groups
//
// =============================================================================
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dsc/fixed_point.hpp"
#include "dsc/tensor.hpp"
#include "dsc/workload.hpp"

namespace dsc {

struct EngineConfig {
    static constexpr TileConfig kTile = kNativeTile;
    static constexpr int kDwcMacs = kTile.Td * kKernelExtent * kKernelExtent * kTile.Tn * kTile.Tm;
    static constexpr int kPwcMacs = kTile.Td * kTile.Tk * kTile.Tn * kTile.Tm;

    int spatial_cap = kDefaultSpatialCap;
};

static_assert(EngineConfig::kDwcMacs == 288);
static_assert(EngineConfig::kPwcMacs == 512);

namespace pipeline {
constexpr int kFetchCycles = 6;     // weight latch + ifmap window fill
constexpr int kDwcStage = 6;        // DWC multiplies
constexpr int kAdderStage = 7;      // 3×3 adder tree
constexpr int kNonConvStage = 8;    // y = k·x + b into the intermediate register
constexpr int kFirstPwcStage = 9;
constexpr int kInitiationCycles = kFirstPwcStage;
}  // namespace pipeline

struct AccessCounters {
    std::int64_t dwc_act_reads = 0;
    std::int64_t dwc_wgt_reads = 0;
    std::int64_t dwc_out_writes = 0;      // intermediate written to external memory
    std::int64_t pwc_act_reads = 0;
    std::int64_t pwc_act_ext_reads = 0;   // intermediate reloaded from external memory
    std::int64_t pwc_wgt_reads = 0;
    std::int64_t pwc_psum_accesses = 0;
    std::int64_t pwc_out_writes = 0;

    AccessCounters& operator+=(const AccessCounters& o);
    bool operator==(const AccessCounters&) const = default;
};

enum class Phase : std::uint8_t { Initiation, Steady };

struct CycleSlot {
    std::uint16_t dwc_active = 0;   // MAC slots busy in the DWC array
    std::uint16_t pwc_active = 0;   // MAC slots busy in the PWC array
    Phase phase = Phase::Steady;
};

class CycleTrace {
public:
    /// Appends `initiation + steady` idle cycles; returns the segment's first
    /// cycle index.
    std::int64_t open_segment(std::int64_t initiation, std::int64_t steady);

    /// Throws std::logic_error if the engine is already busy in that cycle.
    void mark_dwc(std::int64_t cycle, int macs);
    void mark_pwc(std::int64_t cycle, int macs);

    std::int64_t total_cycles() const { return static_cast<std::int64_t>(cycles_.size()); }
    std::int64_t segments() const { return segments_; }
    const std::vector<CycleSlot>& cycles() const { return cycles_; }

    std::optional<std::int64_t> first_pwc_cycle() const;
    std::int64_t dwc_active_cycles() const;
    std::int64_t pwc_active_cycles() const;
    std::int64_t steady_cycles() const;

    /// Busy PWC MAC slots over all slots of the steady-state cycles.
    double pwc_steady_utilization() const;

private:
    std::vector<CycleSlot> cycles_;
    std::int64_t segments_ = 0;
};

struct LayerParams {
    QuantTensor dwc_w;                      // wgt8 [3×3×D]
    QuantTensor pwc_w;                      // wgt8 [D×K]
    std::vector<NonConvParams> dwc_ncv;     // one per input channel
    std::vector<NonConvParams> pwc_ncv;     // one per kernel
};

struct LayerRun {
    QuantTensor ofmap;                      // act8 [N×M×K]
    AccessCounters counters;
    CycleTrace trace;
    std::int64_t intermediate_zeros = 0;    // over N×M×D DWC activations
    std::int64_t intermediate_elems = 0;
};

enum class ExecMode { Fused, Sequential };

/// One DWC engine step: ifmap act8 [T_r×T_c×8] (4×4 stride 1, 5×5 stride 2),
/// weights wgt8 [3×3×8] → acc32 [2×2×8].
QuantTensor dwc_tile(const QuantTensor& ifmap_tile, const QuantTensor& weights, int stride);

/// One PWC engine step: act8 [2×2×8], wgt8 [8×16], acc32 [2×2×16] → acc32
/// [2×2×16] with acc_out = acc_in + act·w.
QuantTensor pwc_tile(const QuantTensor& act_tile, const QuantTensor& weights, const QuantTensor& acc_in);

/// Throws ShapeError on unsupported geometry or parameter-count mismatch.
void check_layer_inputs(const LayerShape& layer, const QuantTensor& ifmap, const LayerParams& params);

/// DWC and PWC overlap; the intermediate never leaves the chip.
LayerRun run_layer_fused(const LayerShape& layer, const QuantTensor& ifmap, const LayerParams& params,
                         const EngineConfig& cfg = {});

/// Baseline: whole DWC ofmap materialized externally, then a PWC pass.
LayerRun run_layer_sequential(const LayerShape& layer, const QuantTensor& ifmap,
                              const LayerParams& params, const EngineConfig& cfg = {});

LayerRun run_layer(const LayerShape& layer, const QuantTensor& ifmap, const LayerParams& params,
                   const EngineConfig& cfg, ExecMode mode);

struct ZeroStats {
    int layer = 0;
    double dwc_zero_fraction = 0.0;   // DWC activations after Non-Conv
    double pwc_zero_fraction = 0.0;   // layer ofmap
};

struct NetworkRun {
    std::vector<LayerRun> layers;
    std::vector<ZeroStats> zero_stats;
};

/// Throws ShapeError if the network fails validation or params.size() differs
/// from the layer count.
NetworkRun run_network(const Network& net, const QuantTensor& input, std::span<const LayerParams> params,
                       const EngineConfig& cfg = {}, ExecMode mode = ExecMode::Fused);

}  // namespace dsc
