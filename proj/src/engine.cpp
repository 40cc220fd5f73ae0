#include "dsc/engine.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace dsc {

namespace {

constexpr TileConfig kT = EngineConfig::kTile;
constexpr int kTaps = kKernelExtent * kKernelExtent;
constexpr int kMaxWin = (kT.Tn - 1) * 2 + kKernelExtent;   // stride-2 window extent
constexpr int kOutPos = kT.Tn * kT.Tm;

using Window = std::array<std::int32_t, kMaxWin * kMaxWin * kT.Td>;   // [r][c][ch], row pitch kMaxWin
using DwcWeights = std::array<std::int32_t, kTaps * kT.Td>;           // [tap][ch]
using DwcAcc = std::array<std::int32_t, kOutPos * kT.Td>;             // [pos][ch]
using ActTile = std::array<std::int32_t, kOutPos * kT.Td>;            // [pos][ch]
using PwcWeights = std::array<std::int32_t, kT.Td * kT.Tk>;           // [ch][k]
using PwcAcc = std::array<std::int32_t, kOutPos * kT.Tk>;             // [pos][k]

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

void dwc_kernel(const Window& win, const DwcWeights& w, int stride, DwcAcc& acc) {
    acc.fill(0);
    for (int i = 0; i < kT.Tn; ++i)
        for (int j = 0; j < kT.Tm; ++j) {
            std::int32_t* out = &acc[sz((i * kT.Tm + j) * kT.Td)];
            for (int h = 0; h < kKernelExtent; ++h)
                for (int x = 0; x < kKernelExtent; ++x) {
                    const std::int32_t* in = &win[sz(((i * stride + h) * kMaxWin + (j * stride + x)) * kT.Td)];
                    const std::int32_t* wt = &w[sz((h * kKernelExtent + x) * kT.Td)];
                    for (int ch = 0; ch < kT.Td; ++ch) out[ch] += in[ch] * wt[ch];
                }
        }
}

void pwc_kernel(const ActTile& act, const PwcWeights& w, PwcAcc& acc) {
    for (int p = 0; p < kOutPos; ++p) {
        std::int32_t* out = &acc[sz(p * kT.Tk)];
        for (int ch = 0; ch < kT.Td; ++ch) {
            const std::int32_t a = act[sz(p * kT.Td + ch)];
            const std::int32_t* wt = &w[sz(ch * kT.Tk)];
            for (int k = 0; k < kT.Tk; ++k) out[k] += a * wt[k];
        }
    }
}

std::string dims_str(const std::vector<std::size_t>& dims) {
    std::string s = "[";
    for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "x" : "") + std::to_string(dims[i]);
    return s + "]";
}

void expect_dims(const QuantTensor& t, DType dtype, const std::vector<std::size_t>& dims, const char* what) {
    if (t.dtype() != dtype || t.dims() != dims)
        throw ShapeError(std::string(what) + ": expected " + dtype_name(dtype) + " " + dims_str(dims) +
                         ", got " + dtype_name(t.dtype()) + " " + dims_str(t.dims()));
}

/// Per-layer working state shared by the fused and sequential schedules:
/// on-chip weight buffers, Non-Conv application, counters.
class LayerMachine {
public:
    LayerMachine(const LayerShape& layer, const LayerParams& params, const EngineConfig& cfg,
                 AccessCounters& ctr)
        : l_(layer), p_(params), ctr_(ctr), grid_(derive_tile_grid(layer, kT, cfg.spatial_cap)),
          dwc_resident_(sz(Dg()), false), dwc_blocks_(sz(Dg())),
          pwc_resident_(sz(Dg() * G()), false), pwc_blocks_(sz(Dg() * G())) {}

    const TileGrid& grid() const { return grid_; }
    int G() const { return static_cast<int>(grid_.kernel_groups); }
    int Dg() const { return static_cast<int>(grid_.depth_groups); }

    int valid_ch(int dg) const { return std::min(kT.Td, l_.D - dg * kT.Td); }
    int valid_k(int kg) const { return std::min(kT.Tk, l_.K - kg * kT.Tk); }
    static int valid_pos(const SpatialTile& t) { return t.out_rows.extent() * t.out_cols.extent(); }

    int dwc_macs(const SpatialTile& t, int dg) const { return kTaps * valid_ch(dg) * valid_pos(t); }
    int pwc_macs(const SpatialTile& t, int dg, int kg) const { return valid_ch(dg) * valid_k(kg) * valid_pos(t); }

    /// DWC + Non-Conv for one spatial position and depth group. Lanes outside
    /// the layer are zero.
    ActTile dwc_position(const QuantTensor& ifmap, const SpatialTile& t, int dg) {
        const int vc = valid_ch(dg);
        Window win{};
        for (int r = t.in_rows_clipped.begin; r < t.in_rows_clipped.end; ++r)
            for (int c = t.in_cols_clipped.begin; c < t.in_cols_clipped.end; ++c) {
                std::int32_t* dst = &win[sz(((r - t.in_rows.begin) * kMaxWin + (c - t.in_cols.begin)) * kT.Td)];
                for (int ch = 0; ch < vc; ++ch) dst[ch] = ifmap.at(sz(r), sz(c), sz(dg * kT.Td + ch));
            }
        // Halo lanes outside the ifmap read as zeros but still count.
        ctr_.dwc_act_reads += std::int64_t{t.in_rows.extent()} * t.in_cols.extent() * vc;

        DwcAcc acc;
        dwc_kernel(win, dwc_weights(dg), l_.stride, acc);

        ActTile act{};
        for (int i = 0; i < t.out_rows.extent(); ++i)
            for (int j = 0; j < t.out_cols.extent(); ++j)
                for (int ch = 0; ch < vc; ++ch) {
                    const int lane = (i * kT.Tm + j) * kT.Td + ch;
                    const std::uint8_t y = nonconv_apply(acc[sz(lane)], p_.dwc_ncv[sz(dg * kT.Td + ch)]);
                    act[sz(lane)] = y;
                    if (y == 0) ++inter_zeros_;
                }
        return act;
    }

    void pwc_step(const ActTile& act, const SpatialTile& t, int dg, int kg, PwcAcc& psum) {
        const int vp = valid_pos(t);
        ctr_.pwc_act_reads += std::int64_t{vp} * valid_ch(dg);
        if (dg > 0) ctr_.pwc_psum_accesses += std::int64_t{vp} * valid_k(kg);
        pwc_kernel(act, pwc_weights(dg, kg), psum);
    }

    void finalize(const SpatialTile& t, int kg, const PwcAcc& psum, QuantTensor& ofmap) {
        for (int i = 0; i < t.out_rows.extent(); ++i)
            for (int j = 0; j < t.out_cols.extent(); ++j)
                for (int k = 0; k < valid_k(kg); ++k) {
                    const int kk = kg * kT.Tk + k;
                    ofmap.at(sz(t.out_rows.begin + i), sz(t.out_cols.begin + j), sz(kk)) =
                        nonconv_apply(psum[sz((i * kT.Tm + j) * kT.Tk + k)], p_.pwc_ncv[sz(kk)]);
                }
        ctr_.pwc_out_writes += std::int64_t{valid_pos(t)} * valid_k(kg);
    }

    std::int64_t intermediate_zeros() const { return inter_zeros_; }

private:
    const DwcWeights& dwc_weights(int dg) {
        DwcWeights& blk = dwc_blocks_[sz(dg)];
        if (!dwc_resident_[sz(dg)]) {
            dwc_resident_[sz(dg)] = true;
            blk.fill(0);
            for (int tap = 0; tap < kTaps; ++tap)
                for (int ch = 0; ch < valid_ch(dg); ++ch)
                    blk[sz(tap * kT.Td + ch)] =
                        p_.dwc_w.at(sz(tap / kKernelExtent), sz(tap % kKernelExtent), sz(dg * kT.Td + ch));
            ctr_.dwc_wgt_reads += kTaps * valid_ch(dg);
        }
        return blk;
    }

    const PwcWeights& pwc_weights(int dg, int kg) {
        const std::size_t id = sz(dg * G() + kg);
        PwcWeights& blk = pwc_blocks_[id];
        if (!pwc_resident_[id]) {
            pwc_resident_[id] = true;
            blk.fill(0);
            for (int ch = 0; ch < valid_ch(dg); ++ch)
                for (int k = 0; k < valid_k(kg); ++k)
                    blk[sz(ch * kT.Tk + k)] = p_.pwc_w.at(sz(dg * kT.Td + ch), sz(kg * kT.Tk + k));
            ctr_.pwc_wgt_reads += std::int64_t{valid_ch(dg)} * valid_k(kg);
        }
        return blk;
    }

    const LayerShape& l_;
    const LayerParams& p_;
    AccessCounters& ctr_;
    TileGrid grid_;
    std::vector<bool> dwc_resident_;
    std::vector<DwcWeights> dwc_blocks_;
    std::vector<bool> pwc_resident_;
    std::vector<PwcWeights> pwc_blocks_;
    std::int64_t inter_zeros_ = 0;
};

QuantTensor make_ofmap(const LayerShape& l) {
    return QuantTensor(DType::Act8, {sz(l.N), sz(l.M), sz(l.K)});
}

}  // namespace

// --- counters / trace --------------------------------------------------------------

AccessCounters& AccessCounters::operator+=(const AccessCounters& o) {
    dwc_act_reads += o.dwc_act_reads;
    dwc_wgt_reads += o.dwc_wgt_reads;
    dwc_out_writes += o.dwc_out_writes;
    pwc_act_reads += o.pwc_act_reads;
    pwc_act_ext_reads += o.pwc_act_ext_reads;
    pwc_wgt_reads += o.pwc_wgt_reads;
    pwc_psum_accesses += o.pwc_psum_accesses;
    pwc_out_writes += o.pwc_out_writes;
    return *this;
}

std::int64_t CycleTrace::open_segment(std::int64_t initiation, std::int64_t steady) {
    const std::int64_t start = total_cycles();
    cycles_.resize(static_cast<std::size_t>(start + initiation + steady));
    for (std::int64_t c = start; c < start + initiation; ++c)
        cycles_[static_cast<std::size_t>(c)].phase = Phase::Initiation;
    ++segments_;
    return start;
}

void CycleTrace::mark_dwc(std::int64_t cycle, int macs) {
    CycleSlot& s = cycles_.at(static_cast<std::size_t>(cycle));
    if (s.dwc_active != 0) throw std::logic_error("DWC engine double-booked at cycle " + std::to_string(cycle));
    s.dwc_active = static_cast<std::uint16_t>(macs);
}

void CycleTrace::mark_pwc(std::int64_t cycle, int macs) {
    CycleSlot& s = cycles_.at(static_cast<std::size_t>(cycle));
    if (s.pwc_active != 0) throw std::logic_error("PWC engine double-booked at cycle " + std::to_string(cycle));
    s.pwc_active = static_cast<std::uint16_t>(macs);
}

std::optional<std::int64_t> CycleTrace::first_pwc_cycle() const {
    auto it = std::find_if(cycles_.begin(), cycles_.end(), [](const CycleSlot& s) { return s.pwc_active > 0; });
    if (it == cycles_.end()) return std::nullopt;
    return it - cycles_.begin();
}

std::int64_t CycleTrace::dwc_active_cycles() const {
    return std::count_if(cycles_.begin(), cycles_.end(), [](const CycleSlot& s) { return s.dwc_active > 0; });
}

std::int64_t CycleTrace::pwc_active_cycles() const {
    return std::count_if(cycles_.begin(), cycles_.end(), [](const CycleSlot& s) { return s.pwc_active > 0; });
}

std::int64_t CycleTrace::steady_cycles() const {
    return std::count_if(cycles_.begin(), cycles_.end(), [](const CycleSlot& s) { return s.phase == Phase::Steady; });
}

double CycleTrace::pwc_steady_utilization() const {
    std::int64_t busy = 0, steady = 0;
    for (const CycleSlot& s : cycles_) {
        if (s.phase != Phase::Steady) continue;
        ++steady;
        busy += s.pwc_active;
    }
    if (steady == 0) return 0.0;
    return static_cast<double>(busy) / (static_cast<double>(steady) * EngineConfig::kPwcMacs);
}

// --- single-tile engine steps ------------------------------------------------------

QuantTensor dwc_tile(const QuantTensor& ifmap_tile, const QuantTensor& weights, int stride) {
    if (stride != 1 && stride != 2) throw ShapeError("dwc_tile: unsupported stride " + std::to_string(stride));
    const std::size_t ext = sz(kT.Tr(stride));
    expect_dims(ifmap_tile, DType::Act8, {ext, ext, sz(kT.Td)}, "dwc_tile ifmap");
    expect_dims(weights, DType::Wgt8, {3, 3, sz(kT.Td)}, "dwc_tile weights");

    Window win{};
    for (std::size_t r = 0; r < ext; ++r)
        for (std::size_t c = 0; c < ext; ++c)
            for (std::size_t ch = 0; ch < sz(kT.Td); ++ch)
                win[(r * kMaxWin + c) * kT.Td + ch] = ifmap_tile.at(r, c, ch);
    DwcWeights w{};
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = weights.data()[i];

    DwcAcc acc;
    dwc_kernel(win, w, stride, acc);
    return QuantTensor(DType::Acc32, {sz(kT.Tn), sz(kT.Tm), sz(kT.Td)}, {acc.begin(), acc.end()});
}

QuantTensor pwc_tile(const QuantTensor& act_tile, const QuantTensor& weights, const QuantTensor& acc_in) {
    expect_dims(act_tile, DType::Act8, {sz(kT.Tn), sz(kT.Tm), sz(kT.Td)}, "pwc_tile activations");
    expect_dims(weights, DType::Wgt8, {sz(kT.Td), sz(kT.Tk)}, "pwc_tile weights");
    expect_dims(acc_in, DType::Acc32, {sz(kT.Tn), sz(kT.Tm), sz(kT.Tk)}, "pwc_tile acc_in");

    ActTile act{};
    std::copy(act_tile.data().begin(), act_tile.data().end(), act.begin());
    PwcWeights w{};
    std::copy(weights.data().begin(), weights.data().end(), w.begin());
    PwcAcc acc{};
    std::copy(acc_in.data().begin(), acc_in.data().end(), acc.begin());

    pwc_kernel(act, w, acc);
    return QuantTensor(DType::Acc32, acc_in.dims(), {acc.begin(), acc.end()});
}

// --- layer execution ---------------------------------------------------------------

void check_layer_inputs(const LayerShape& l, const QuantTensor& ifmap, const LayerParams& p) {
    if (l.stride != 1 && l.stride != 2) throw ShapeError("unsupported stride " + std::to_string(l.stride));
    if (l.H != kKernelExtent || l.W != kKernelExtent) throw ShapeError("engine supports 3x3 kernels only");
    if (l.N != conv_out_extent(l.R, l.H, l.stride, l.pad) || l.M != conv_out_extent(l.C, l.W, l.stride, l.pad))
        throw ShapeError("layer " + std::to_string(l.index) + ": N/M inconsistent with R/C");
    expect_dims(ifmap, DType::Act8, {sz(l.R), sz(l.C), sz(l.D)}, "ifmap");
    expect_dims(p.dwc_w, DType::Wgt8, {3, 3, sz(l.D)}, "DWC weights");
    expect_dims(p.pwc_w, DType::Wgt8, {sz(l.D), sz(l.K)}, "PWC weights");
    if (p.dwc_ncv.size() != sz(l.D))
        throw ShapeError("DWC Non-Conv parameter count " + std::to_string(p.dwc_ncv.size()) + " != D " +
                         std::to_string(l.D));
    if (p.pwc_ncv.size() != sz(l.K))
        throw ShapeError("PWC Non-Conv parameter count " + std::to_string(p.pwc_ncv.size()) + " != K " +
                         std::to_string(l.K));
}

LayerRun run_layer_fused(const LayerShape& l, const QuantTensor& ifmap, const LayerParams& params,
                         const EngineConfig& cfg) {
    check_layer_inputs(l, ifmap, params);
    LayerRun run;
    run.ofmap = make_ofmap(l);
    LayerMachine m(l, params, cfg, run.counters);
    const int G = m.G();

    std::vector<PwcAcc> psum;
    std::array<ActTile, 2> inter{};   // double-buffered intermediate register

    for (const BufferTile& bt : m.grid().buffer_tiles) {
        const int P = static_cast<int>(bt.positions.size());
        psum.assign(sz(P * G), PwcAcc{});

        for (int dg = 0; dg < m.Dg(); ++dg) {
            const std::int64_t s0 = run.trace.open_segment(pipeline::kInitiationCycles, std::int64_t{P} * G);
            for (int p = 0; p < P; ++p) {
                const SpatialTile& t = bt.positions[sz(p)];
                ActTile& slot = inter[sz(p % 2)];
                slot = m.dwc_position(ifmap, t, dg);
                run.trace.mark_dwc(s0 + pipeline::kDwcStage + std::int64_t{p} * G, m.dwc_macs(t, dg));

                for (int kg = 0; kg < G; ++kg) {
                    m.pwc_step(slot, t, dg, kg, psum[sz(p * G + kg)]);
                    run.trace.mark_pwc(s0 + pipeline::kFirstPwcStage + std::int64_t{p} * G + kg,
                                       m.pwc_macs(t, dg, kg));
                }
            }
        }
        for (int p = 0; p < P; ++p)
            for (int kg = 0; kg < G; ++kg) m.finalize(bt.positions[sz(p)], kg, psum[sz(p * G + kg)], run.ofmap);
    }

    run.intermediate_zeros = m.intermediate_zeros();
    run.intermediate_elems = std::int64_t{l.N} * l.M * l.D;
    return run;
}

LayerRun run_layer_sequential(const LayerShape& l, const QuantTensor& ifmap, const LayerParams& params,
                              const EngineConfig& cfg) {
    check_layer_inputs(l, ifmap, params);
    LayerRun run;
    run.ofmap = make_ofmap(l);
    LayerMachine m(l, params, cfg, run.counters);
    const int G = m.G();

    // DWC pass: the whole intermediate goes to external memory.
    QuantTensor inter(DType::Act8, {sz(l.N), sz(l.M), sz(l.D)});
    for (const BufferTile& bt : m.grid().buffer_tiles) {
        const int P = static_cast<int>(bt.positions.size());
        for (int dg = 0; dg < m.Dg(); ++dg) {
            const std::int64_t s0 = run.trace.open_segment(pipeline::kInitiationCycles, P);
            for (int p = 0; p < P; ++p) {
                const SpatialTile& t = bt.positions[sz(p)];
                const ActTile act = m.dwc_position(ifmap, t, dg);
                run.trace.mark_dwc(s0 + pipeline::kDwcStage + p, m.dwc_macs(t, dg));
                for (int i = 0; i < t.out_rows.extent(); ++i)
                    for (int j = 0; j < t.out_cols.extent(); ++j)
                        for (int ch = 0; ch < m.valid_ch(dg); ++ch)
                            inter.at(sz(t.out_rows.begin + i), sz(t.out_cols.begin + j), sz(dg * kT.Td + ch)) =
                                act[sz((i * kT.Tm + j) * kT.Td + ch)];
                run.counters.dwc_out_writes += std::int64_t{LayerMachine::valid_pos(t)} * m.valid_ch(dg);
            }
        }
    }

    // PWC pass over the reloaded intermediate.
    run.counters.pwc_act_ext_reads += static_cast<std::int64_t>(inter.size());
    std::vector<PwcAcc> psum;
    for (const BufferTile& bt : m.grid().buffer_tiles) {
        const int P = static_cast<int>(bt.positions.size());
        psum.assign(sz(P * G), PwcAcc{});
        for (int dg = 0; dg < m.Dg(); ++dg) {
            const std::int64_t s0 = run.trace.open_segment(pipeline::kInitiationCycles, std::int64_t{P} * G);
            for (int p = 0; p < P; ++p) {
                const SpatialTile& t = bt.positions[sz(p)];
                ActTile act{};
                for (int i = 0; i < t.out_rows.extent(); ++i)
                    for (int j = 0; j < t.out_cols.extent(); ++j)
                        for (int ch = 0; ch < m.valid_ch(dg); ++ch)
                            act[sz((i * kT.Tm + j) * kT.Td + ch)] =
                                inter.at(sz(t.out_rows.begin + i), sz(t.out_cols.begin + j), sz(dg * kT.Td + ch));
                for (int kg = 0; kg < G; ++kg) {
                    m.pwc_step(act, t, dg, kg, psum[sz(p * G + kg)]);
                    run.trace.mark_pwc(s0 + pipeline::kFirstPwcStage + std::int64_t{p} * G + kg,
                                       m.pwc_macs(t, dg, kg));
                }
            }
        }
        for (int p = 0; p < P; ++p)
            for (int kg = 0; kg < G; ++kg) m.finalize(bt.positions[sz(p)], kg, psum[sz(p * G + kg)], run.ofmap);
    }

    run.intermediate_zeros = m.intermediate_zeros();
    run.intermediate_elems = static_cast<std::int64_t>(inter.size());
    return run;
}

LayerRun run_layer(const LayerShape& layer, const QuantTensor& ifmap, const LayerParams& params,
                   const EngineConfig& cfg, ExecMode mode) {
    return mode == ExecMode::Fused ? run_layer_fused(layer, ifmap, params, cfg)
                                   : run_layer_sequential(layer, ifmap, params, cfg);
}

NetworkRun run_network(const Network& net, const QuantTensor& input, std::span<const LayerParams> params,
                       const EngineConfig& cfg, ExecMode mode) {
    if (const auto v = validate_network(net); !v.empty())
        throw ShapeError("network invalid at layer " + std::to_string(v.front().layer) + ": " + v.front().rule);
    if (params.size() != net.layers.size())
        throw ShapeError("parameter bundle has " + std::to_string(params.size()) + " layers, network has " +
                         std::to_string(net.layers.size()));

    NetworkRun out;
    out.layers.reserve(net.layers.size());
    const QuantTensor* x = &input;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        out.layers.push_back(run_layer(net.layers[i], *x, params[i], cfg, mode));
        const LayerRun& r = out.layers.back();
        ZeroStats z;
        z.layer = net.layers[i].index;
        z.dwc_zero_fraction = r.intermediate_elems == 0
                                  ? 0.0
                                  : static_cast<double>(r.intermediate_zeros) / static_cast<double>(r.intermediate_elems);
        z.pwc_zero_fraction = zero_fraction(r.ofmap);
        out.zero_stats.push_back(z);
        x = &r.ofmap;
    }
    return out;
}

}  // namespace dsc
