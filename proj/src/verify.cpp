#include "dsc/verify.hpp"

#include <algorithm>

#include "dsc/reference.hpp"

namespace dsc {

Rng trial_rng(std::uint64_t seed, int layer, int trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(layer), static_cast<std::uint32_t>(trial)};
    return Rng(seq);
}

GoldenResult run_golden(const Network& net, const GoldenOptions& opt) {
    GoldenResult res;
    for (const LayerShape& l : net.layers) {
        if (!opt.layers.empty() && std::find(opt.layers.begin(), opt.layers.end(), l.index) == opt.layers.end())
            continue;
        for (int trial = 0; trial < opt.trials_per_layer; ++trial) {
            Rng rng = trial_rng(opt.seed, l.index, trial);
            const QuantTensor ifmap = random_activations(rng, static_cast<std::size_t>(l.R),
                                                         static_cast<std::size_t>(l.C), static_cast<std::size_t>(l.D));
            const LayerParams params = random_layer_params(rng, l);

            LayerRun fused = run_layer_fused(l, ifmap, params, opt.engine);
            const LayerRun seq = run_layer_sequential(l, ifmap, params, opt.engine);
            const QuantTensor oracle = ref::layer(l, ifmap, params);
            if (opt.inject_fault && fused.ofmap.size() > 0)
                fused.ofmap.data()[0] = (fused.ofmap.data()[0] + 1) % 256;

            ++res.trials_run;
            res.elements_compared += static_cast<std::int64_t>(oracle.size());
            if (auto m = first_mismatch(fused.ofmap, oracle)) {
                res.failure = GoldenFailure{l.index, trial, "fused", *m};
                return res;
            }
            if (auto m = first_mismatch(seq.ofmap, oracle)) {
                res.failure = GoldenFailure{l.index, trial, "sequential", *m};
                return res;
            }
        }
    }
    return res;
}

TraceCheck crosscheck_layer(const LayerShape& l, const EngineConfig& engine, const TimingConfig& model,
                            std::uint64_t seed) {
    Rng rng = trial_rng(seed, l.index, 0);
    const QuantTensor ifmap = random_activations(rng, static_cast<std::size_t>(l.R), static_cast<std::size_t>(l.C),
                                                 static_cast<std::size_t>(l.D));
    const LayerParams params = random_layer_params(rng, l);
    const LayerRun run = run_layer_fused(l, ifmap, params, engine);
    return check_trace(l, model, run.trace);
}

}  // namespace dsc
