// dscsim: command-line front end for the dual-engine DSC accelerator model.
//
//   dscsim simulate  run the engine over a network, emit ofmaps and counters
//   dscsim explore   loop-order / tiling sweep and intermediate-access report
//   dscsim timing    analytic latency/throughput, optional trace cross-check
//   dscsim golden    fused vs sequential vs naive oracle on seeded data
//
// Exit codes: 0 ok, 2 bad input file, 3 network validation, 4 timing
// cross-check mismatch, 5 golden mismatch.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dsc/bundle.hpp"
#include "dsc/dse.hpp"
#include "dsc/engine.hpp"
#include "dsc/manifest.hpp"
#include "dsc/timing.hpp"
#include "dsc/verify.hpp"
#include "dsc/workload.hpp"

namespace fs = std::filesystem;
using namespace dsc;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitValidation = 3;
constexpr int kExitCrosscheck = 4;
constexpr int kExitGolden = 5;

struct ValidationFailed {};

Network load_and_validate(const RunManifest& m) {
    Network net = m.network ? load_network(*m.network) : builtin_mobilenet_v1_cifar10();
    if (net.layers.empty()) {
        std::cerr << "network has no layers\n";
        throw ValidationFailed{};
    }
    if (const auto v = validate_network(net); !v.empty()) {
        for (const Violation& x : v) std::cerr << "layer " << x.layer << ": " << x.rule << "\n";
        throw ValidationFailed{};
    }
    return net;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

void prepare_out(const RunManifest& m) {
    fs::create_directories(m.out_dir);
    write_text(fs::path(m.out_dir) / "manifest.json", manifest_to_json(m));
}

int cmd_simulate(const RunManifest& m, bool dump_params) {
    const Network net = load_and_validate(m);
    if (m.mode != "fused" && m.mode != "sequential") throw CLI::ValidationError("--mode", "fused or sequential");

    Rng rng(m.seed);
    const LayerShape& first = net.layers.front();
    const QuantTensor input = m.input ? read_tensor(fs::path(*m.input))
                                      : random_activations(rng, static_cast<std::size_t>(first.R),
                                                           static_cast<std::size_t>(first.C),
                                                           static_cast<std::size_t>(first.D));
    const std::vector<LayerParams> params = m.weights ? load_bundle(*m.weights, net) : random_bundle(rng, net);

    prepare_out(m);
    const fs::path out(m.out_dir);
    if (dump_params) {
        write_bundle(out / "params", net, params);
        write_tensor(out / "params" / "input.t", input);
    }

    EngineConfig cfg;
    cfg.spatial_cap = m.spatial_cap;
    const NetworkRun run =
        run_network(net, input, params, cfg, m.mode == "fused" ? ExecMode::Fused : ExecMode::Sequential);

    std::ostringstream counters, zeros;
    counters << "layer,dwc_act_reads,dwc_wgt_reads,dwc_out_writes,pwc_act_reads,pwc_act_ext_reads,"
                "pwc_wgt_reads,pwc_psum_accesses,pwc_out_writes,cycles\n";
    zeros << "layer,dwc_zero_fraction,pwc_zero_fraction\n" << std::fixed << std::setprecision(6);
    for (std::size_t i = 0; i < run.layers.size(); ++i) {
        const LayerRun& r = run.layers[i];
        const AccessCounters& c = r.counters;
        const int idx = net.layers[i].index;
        write_tensor(out / ("L" + std::to_string(idx) + ".ofmap"), r.ofmap);
        counters << idx << ',' << c.dwc_act_reads << ',' << c.dwc_wgt_reads << ',' << c.dwc_out_writes << ','
                 << c.pwc_act_reads << ',' << c.pwc_act_ext_reads << ',' << c.pwc_wgt_reads << ','
                 << c.pwc_psum_accesses << ',' << c.pwc_out_writes << ',' << r.trace.total_cycles() << '\n';
        zeros << idx << ',' << run.zero_stats[i].dwc_zero_fraction << ',' << run.zero_stats[i].pwc_zero_fraction
              << '\n';
    }
    write_text(out / "counters.csv", counters.str());
    write_text(out / "zero_stats.csv", zeros.str());
    std::cout << "simulated " << run.layers.size() << " layers (" << m.mode << ") -> " << out.string() << "\n";
    return 0;
}

int cmd_explore(const RunManifest& m) {
    const Network net = load_and_validate(m);
    prepare_out(m);
    const fs::path out(m.out_dir);

    std::vector<AccessReport> reports;
    for (const SweepPoint& pt : all_sweep_points()) reports.push_back(network_access_report(net, pt));
    std::ostringstream dse;
    write_dse_csv(dse, reports);
    write_text(out / "dse.csv", dse.str());

    std::vector<ReductionReport> reductions;
    if (m.convention) {
        reductions.push_back(intermediate_reduction(net, parse_convention(*m.convention)));
    } else {
        reductions.push_back(intermediate_reduction(net, ReductionConvention::Raw));
        reductions.push_back(intermediate_reduction(net, ReductionConvention::TableII));
    }
    std::ostringstream red;
    write_reduction_csv(red, reductions);
    write_text(out / "reduction.csv", red.str());

    const auto ranked = rank_configs(net);
    std::cout << "top: " << ranked.front().point.label() << " total_access=" << ranked.front().total_access << "\n";
    for (std::size_t i = 0; i < ranked.size(); ++i)
        std::cout << std::setw(3) << i + 1 << "  " << std::left << std::setw(36) << ranked[i].point.label()
                  << std::right << std::setw(12) << ranked[i].total_access << "  pe=" << ranked[i].pe_total << "\n";
    for (const ReductionReport& r : reductions)
        std::cout << "intermediate elimination (" << convention_name(r.convention) << "): " << std::fixed
                  << std::setprecision(1) << 100.0 * r.total.reduction() << "% total\n";
    return 0;
}

int cmd_timing(const RunManifest& m) {
    const Network net = load_and_validate(m);
    if (m.freq_hz <= 0) throw CLI::ValidationError("--freq", "must be positive");
    prepare_out(m);

    TimingConfig tc;
    tc.spatial_cap = m.spatial_cap;
    tc.period_ns = 1e9 / m.freq_hz;
    const NetworkTiming t = network_timing(net, tc);
    write_text(fs::path(m.out_dir) / "timing.json", timing_to_json(t));

    std::cout << "layer      cycles          ns       gops  dwc_util  pwc_util\n" << std::fixed;
    for (const LayerTiming& l : t.layers)
        std::cout << std::setw(5) << l.index << std::setw(12) << l.total_cycles << std::setw(12)
                  << std::setprecision(1) << l.total_ns << std::setw(11) << std::setprecision(2)
                  << l.throughput_gops << std::setw(10) << std::setprecision(3) << l.dwc_utilization
                  << std::setw(10) << l.pwc_utilization << "\n";
    std::cout << "mean " << std::setprecision(2) << t.mean_gops << " GOPS, ops-weighted " << t.weighted_gops
              << " GOPS, total " << std::setprecision(1) << t.total_ns << " ns\n";

    if (m.crosscheck) {
        EngineConfig ec;
        ec.spatial_cap = m.spatial_cap;
        for (const LayerShape& l : net.layers) {
            const TraceCheck c = crosscheck_layer(l, ec, tc, m.seed);
            if (!c.ok) {
                std::cerr << "crosscheck failed: " << c.detail << "\n";
                return kExitCrosscheck;
            }
        }
        std::cout << "crosscheck: engine traces match the model on all " << net.layers.size() << " layers\n";
    }
    return 0;
}

int cmd_golden(const RunManifest& m, bool inject_fault) {
    const Network net = load_and_validate(m);
    prepare_out(m);

    GoldenOptions opt;
    opt.seed = m.seed;
    opt.layers = m.layers;
    opt.trials_per_layer = m.trials;
    opt.engine.spatial_cap = m.spatial_cap;
    opt.inject_fault = inject_fault;
    const GoldenResult r = run_golden(net, opt);

    std::ostringstream summary;
    summary << "seed " << m.seed << "\ntrials " << r.trials_run << "\nelements " << r.elements_compared << "\n";
    if (r.ok()) {
        summary << "result PASS (fused == sequential == oracle)\n";
    } else {
        const GoldenFailure& f = *r.failure;
        summary << "result FAIL layer " << f.layer << " trial " << f.trial << " " << f.path << " at "
                << f.mismatch.describe() << "\n";
    }
    write_text(fs::path(m.out_dir) / "golden.txt", summary.str());
    std::cout << summary.str();
    if (!r.ok()) {
        std::cerr << "golden mismatch: layer " << r.failure->layer << ", " << r.failure->path << " output "
                  << r.failure->mismatch.describe() << "\n";
        return kExitGolden;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-engine depthwise-separable convolution accelerator model"};
    app.require_subcommand(1);

    RunManifest m;
    std::string network, weights, input, convention;
    bool dump_params = false, inject_fault = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--network", network, "Network JSON file (default: built-in MobileNetV1/CIFAR-10)");
        sub->add_option("--seed", m.seed, "Seed for generated data");
        sub->add_option("--out", m.out_dir, "Output directory");
        sub->add_option("--spatial-cap", m.spatial_cap, "Buffer tile extent in output positions")
            ->check(CLI::PositiveNumber);
    };

    auto* sim = app.add_subcommand("simulate", "Run the engine model over a network");
    common(sim);
    sim->add_option("--weights", weights, "Parameter bundle directory (default: seeded random)");
    sim->add_option("--input", input, "Input tensor file (default: seeded random)");
    sim->add_option("--mode", m.mode, "fused or sequential")->check(CLI::IsMember({"fused", "sequential"}));
    sim->add_flag("--dump-params", dump_params, "Also write the parameters and input under OUT/params");

    auto* exp = app.add_subcommand("explore", "Loop-order and tiling design-space sweep");
    common(exp);
    exp->add_option("--convention", convention, "raw or tableII (default: both)")
        ->check(CLI::IsMember({"raw", "tableII"}));

    auto* tim = app.add_subcommand("timing", "Analytic latency and throughput");
    common(tim);
    tim->add_option("--freq", m.freq_hz, "Clock frequency in Hz");
    tim->add_flag("--crosscheck", m.crosscheck, "Compare engine cycle traces with the model");

    auto* gold = app.add_subcommand("golden", "Bit-exact fused/sequential/oracle comparison");
    common(gold);
    gold->add_option("--layers", m.layers, "Comma-separated layer indices")->delimiter(',');
    gold->add_option("--trials", m.trials, "Seeded trials per layer")->check(CLI::PositiveNumber);
    gold->add_flag("--inject-fault", inject_fault, "Perturb one fused output element (negative control)");

    CLI11_PARSE(app, argc, argv);

    if (!network.empty()) m.network = network;
    if (!weights.empty()) m.weights = weights;
    if (!input.empty()) m.input = input;
    if (!convention.empty()) m.convention = convention;

    try {
        if (sim->parsed()) {
            m.command = "simulate";
            return cmd_simulate(m, dump_params);
        }
        if (exp->parsed()) {
            m.command = "explore";
            return cmd_explore(m);
        }
        if (tim->parsed()) {
            m.command = "timing";
            return cmd_timing(m);
        }
        m.command = "golden";
        return cmd_golden(m, inject_fault);
    } catch (const ValidationFailed&) {
        return kExitValidation;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
