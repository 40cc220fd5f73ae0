// verify.hpp: seeded golden comparisons and engine/model trace cross-checks
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsc/bundle.hpp"
#include "dsc/engine.hpp"
#include "dsc/timing.hpp"

namespace dsc {

/// Deterministic generator for (seed, layer, trial).
Rng trial_rng(std::uint64_t seed, int layer, int trial);

struct GoldenFailure {
    int layer = 0;
    int trial = 0;
    std::string path;   // "fused" or "sequential"
    TensorMismatch mismatch;
};

struct GoldenResult {
    int trials_run = 0;
    std::int64_t elements_compared = 0;
    std::optional<GoldenFailure> failure;   // first mismatch, if any
    bool ok() const { return !failure; }
};

struct GoldenOptions {
    std::uint64_t seed = 7;
    std::vector<int> layers;   // empty: all
    int trials_per_layer = 1;
    EngineConfig engine;
    bool inject_fault = false;   // perturbs one fused output element (negative control)
};

/// Runs fused, sequential and the naive oracle on seeded random data for
/// each selected layer; stops at the first mismatch.
GoldenResult run_golden(const Network& net, const GoldenOptions& opt);

/// Executes the fused engine on seeded random data and checks its trace
/// against the analytic model.
TraceCheck crosscheck_layer(const LayerShape& layer, const EngineConfig& engine, const TimingConfig& model,
                            std::uint64_t seed);

}  // namespace dsc
