// manifest.hpp: everything that determines a CLI run
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dsc {

struct RunManifest {
    std::string command;
    std::optional<std::string> network;   // unset: built-in network
    std::optional<std::string> weights;   // bundle directory; unset: seeded
    std::optional<std::string> input;     // tensor file; unset: seeded
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string mode = "fused";
    double freq_hz = 1e9;
    int spatial_cap = 8;
    std::optional<std::string> convention;   // unset: both
    bool crosscheck = false;
    std::vector<int> layers;                  // empty: all
    int trials = 1;

    bool operator==(const RunManifest&) const = default;
};

std::string manifest_to_json(const RunManifest& m);
/// Throws FormatError on malformed input.
RunManifest manifest_from_json(const std::string& text);

}  // namespace dsc
