// dse.hpp: closed-form design-space exploration over loop orders and tiles
// =============================================================================
//
// Loop levels (Loop1 innermost):
//   Loop1  MAC within the spatial window
//   Loop2  channels within a depth tile (T_d)
//   Loop3  spatial scan over the ifmap/ofmap
//   Loop4  depth tiles over D
//   Loop5  kernel tiles over K (PWC only)
//
//   La: Loop1 → Loop2 → Loop3 → Loop4 → Loop5
//   Lb: Loop1 → Loop2 → Loop4 → Loop3 → Loop5
//
// Under La weights stay stationary across the spatial scan and psums are
// revisited once per extra depth tile. Under Lb the full depth accumulates
// locally (no psum traffic) but weights are re-read for every spatial tile.
// A psum revisit is one read-modify-write access per accumulator.
//
// =============================================================================
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsc/workload.hpp"

namespace dsc {

enum class LoopOrder { La, Lb };

const char* loop_order_name(LoopOrder o);

struct TileCase {
    int Td;
    int Tk;
};

/// Cases 1–6, indexed by case number − 1.
constexpr std::array<TileCase, 6> kTileCases{{{4, 4}, {4, 8}, {4, 16}, {8, 4}, {8, 8}, {8, 16}}};

struct SweepPoint {
    LoopOrder order = LoopOrder::La;
    int Tn = 2;          // T_n = T_m
    int case_id = 6;     // 1..6

    int Td() const { return kTileCases.at(static_cast<std::size_t>(case_id - 1)).Td; }
    int Tk() const { return kTileCases.at(static_cast<std::size_t>(case_id - 1)).Tk; }
    TileConfig tile() const { return {Tn, Tn, Td(), Tk()}; }
    std::string label() const;

    bool operator==(const SweepPoint&) const = default;
};

constexpr SweepPoint kNativePoint{LoopOrder::La, 2, 6};

/// 2 orders × T_n ∈ {1, 2} × 6 cases.
std::vector<SweepPoint> all_sweep_points();

struct PeArray {
    std::int64_t dwc = 0;
    std::int64_t pwc = 0;
    std::int64_t total() const { return dwc + pwc; }
};

PeArray pe_array_size(const SweepPoint& pt);

struct AccessRow {
    int layer = -1;   // -1 for totals
    std::int64_t dwc_act = 0, dwc_wgt = 0, pwc_act = 0, pwc_wgt = 0, psum = 0;
    std::int64_t pe_dwc = 0, pe_pwc = 0;

    std::int64_t activation() const { return dwc_act + pwc_act + psum; }
    std::int64_t weight() const { return dwc_wgt + pwc_wgt; }
    std::int64_t total() const { return activation() + weight(); }
};

AccessRow access_counts(const LayerShape& layer, const SweepPoint& pt);

struct AccessReport {
    SweepPoint point;
    std::vector<AccessRow> layers;
    AccessRow total;
};

AccessReport network_access_report(const Network& net, const SweepPoint& pt);

enum class ReductionConvention { Raw, TableII };

/// Accepts "raw" and "tableII"; throws std::invalid_argument otherwise.
ReductionConvention parse_convention(const std::string& s);
const char* convention_name(ReductionConvention c);

struct ReductionRow {
    int layer = -1;   // -1 for totals
    std::int64_t baseline = 0;
    std::int64_t proposed = 0;
    double reduction() const {
        return baseline == 0 ? 0.0 : 1.0 - static_cast<double>(proposed) / static_cast<double>(baseline);
    }
};

struct ReductionReport {
    ReductionConvention convention;
    std::vector<ReductionRow> layers;
    ReductionRow total;
};

ReductionReport intermediate_reduction(const Network& net, ReductionConvention convention);

struct RankedPoint {
    SweepPoint point;
    std::int64_t total_access = 0;
    std::int64_t pe_total = 0;
};

/// Ascending by total access; ties by PE count, then case id.
std::vector<RankedPoint> rank_configs(const Network& net, const std::vector<SweepPoint>& points = all_sweep_points());

// --- CSV -----------------------------------------------------------------------------

void write_dse_csv(std::ostream& out, const std::vector<AccessReport>& reports);
void write_reduction_csv(std::ostream& out, const std::vector<ReductionReport>& reports);

}  // namespace dsc
