#include "dsc/workload.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dsc {

LayerShape make_layer(int index, int R, int C, int D, int K, int stride, int pad) {
    LayerShape l;
    l.index = index;
    l.R = R;
    l.C = C;
    l.D = D;
    l.K = K;
    l.stride = stride;
    l.pad = pad;
    if (stride > 0) {
        l.N = conv_out_extent(R, l.H, stride, pad);
        l.M = conv_out_extent(C, l.W, stride, pad);
    }
    return l;
}

std::vector<Violation> validate_network(const Network& net) {
    std::vector<Violation> out;
    auto fail = [&](int layer, std::string rule) { out.push_back({layer, std::move(rule)}); };

    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerShape& l = net.layers[i];
        const int idx = static_cast<int>(i);
        if (l.H != kKernelExtent || l.W != kKernelExtent)
            fail(idx, "kernel must be 3x3 (H=" + std::to_string(l.H) + ", W=" + std::to_string(l.W) + ")");
        if (l.stride != 1 && l.stride != 2) {
            fail(idx, "stride must be 1 or 2 (got " + std::to_string(l.stride) + ")");
        } else {
            if (l.N != conv_out_extent(l.R, l.H, l.stride, l.pad))
                fail(idx, "N inconsistent with R, stride, pad");
            if (l.M != conv_out_extent(l.C, l.W, l.stride, l.pad))
                fail(idx, "M inconsistent with C, stride, pad");
        }
        if (l.R < 1 || l.C < 1) fail(idx, "R and C must be >= 1");
        if (l.N < 1 || l.M < 1) fail(idx, "N and M must be >= 1");
        if (l.D < 1) fail(idx, "D must be >= 1");
        if (l.K < 1) fail(idx, "K must be >= 1");
        if (l.pad < 0) fail(idx, "pad must be >= 0");

        if (i > 0) {
            const LayerShape& prev = net.layers[i - 1];
            if (prev.K != l.D)
                fail(idx, "chaining: K(" + std::to_string(i - 1) + ")=" + std::to_string(prev.K) +
                              " != D(" + std::to_string(i) + ")=" + std::to_string(l.D));
            if (prev.N != l.R || prev.M != l.C)
                fail(idx, "chaining: previous ofmap " + std::to_string(prev.N) + "x" +
                              std::to_string(prev.M) + " != ifmap " + std::to_string(l.R) + "x" +
                              std::to_string(l.C));
        }
    }
    return out;
}

Network builtin_mobilenet_v1_cifar10() {
    struct Row { int R, D, K, stride; };
    static constexpr Row rows[] = {
        {32, 32, 64, 1},    {32, 64, 128, 2},   {16, 128, 128, 1},  {16, 128, 256, 2},
        {8, 256, 256, 1},   {8, 256, 512, 2},   {4, 512, 512, 1},   {4, 512, 512, 1},
        {4, 512, 512, 1},   {4, 512, 512, 1},   {4, 512, 512, 1},   {4, 512, 1024, 2},
        {2, 1024, 1024, 1},
    };
    Network net;
    net.name = "mobilenet_v1_cifar10";
    int idx = 0;
    for (const Row& r : rows) {
        net.layers.push_back(make_layer(idx++, r.R, r.R, r.D, r.K, r.stride));
    }
    return net;
}

MacCounts layer_mac_counts(const LayerShape& l) {
    const std::int64_t nm = std::int64_t{l.N} * l.M;
    return {nm * l.D * l.H * l.W, nm * l.D * l.K};
}

namespace {

Range clip(Range r, int lo, int hi) {
    return {std::clamp(r.begin, lo, hi), std::clamp(r.end, lo, hi)};
}

}  // namespace

TileGrid derive_tile_grid(const LayerShape& layer, const TileConfig& cfg, int spatial_cap) {
    if (cfg.Tn < 1 || cfg.Tm < 1 || cfg.Td < 1 || cfg.Tk < 1)
        throw std::invalid_argument("tile sizes must be positive");
    if (spatial_cap < cfg.Tn || spatial_cap < cfg.Tm)
        throw std::invalid_argument("spatial_cap " + std::to_string(spatial_cap) +
                                    " smaller than the spatial tile");
    if (spatial_cap % cfg.Tn != 0 || spatial_cap % cfg.Tm != 0)
        throw std::invalid_argument("spatial_cap must be a multiple of T_n and T_m");

    TileGrid g;
    g.positions_per_buffer_tile = ceil_div(std::min(layer.N, spatial_cap), cfg.Tn) *
                                  ceil_div(std::min(layer.M, spatial_cap), cfg.Tm);
    g.n_buf = ceil_div(layer.N, spatial_cap) * ceil_div(layer.M, spatial_cap);
    g.depth_groups = ceil_div(layer.D, cfg.Td);
    g.kernel_groups = ceil_div(layer.K, cfg.Tk);

    const int tr = cfg.Tr(layer.stride, layer.H);
    const int tc = cfg.Tc(layer.stride, layer.W);

    for (int br = 0; br < layer.N; br += spatial_cap) {
        for (int bc = 0; bc < layer.M; bc += spatial_cap) {
            BufferTile bt;
            bt.out_rows = {br, std::min(br + spatial_cap, layer.N)};
            bt.out_cols = {bc, std::min(bc + spatial_cap, layer.M)};
            for (int r = bt.out_rows.begin; r < bt.out_rows.end; r += cfg.Tn) {
                for (int c = bt.out_cols.begin; c < bt.out_cols.end; c += cfg.Tm) {
                    SpatialTile t;
                    t.out_rows = {r, std::min(r + cfg.Tn, bt.out_rows.end)};
                    t.out_cols = {c, std::min(c + cfg.Tm, bt.out_cols.end)};
                    const int ir = r * layer.stride - layer.pad;
                    const int ic = c * layer.stride - layer.pad;
                    t.in_rows = {ir, ir + tr};
                    t.in_cols = {ic, ic + tc};
                    t.in_rows_clipped = clip(t.in_rows, 0, layer.R);
                    t.in_cols_clipped = clip(t.in_cols, 0, layer.C);
                    bt.positions.push_back(t);
                }
            }
            g.buffer_tiles.push_back(std::move(bt));
        }
    }
    return g;
}

// --- network file --------------------------------------------------------------

namespace {

int require_int(const nlohmann::json& obj, const char* key, std::size_t layer) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw FormatError("layer " + std::to_string(layer) + ": missing field '" + key + "'");
    if (!it->is_number_integer())
        throw FormatError("layer " + std::to_string(layer) + ": field '" + key + "' must be an integer");
    return it->get<int>();
}

}  // namespace

Network parse_network_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("network file: ") + e.what());
    }
    if (!doc.is_object()) throw FormatError("network file: top level must be an object");

    static const std::set<std::string> top_keys{"name", "layers"};
    static const std::set<std::string> layer_keys{"R", "C", "D", "K", "stride", "pad"};
    for (const auto& [key, _] : doc.items())
        if (!top_keys.count(key)) throw FormatError("network file: unknown field '" + key + "'");

    if (!doc.contains("name") || !doc["name"].is_string())
        throw FormatError("network file: 'name' must be a string");
    if (!doc.contains("layers") || !doc["layers"].is_array())
        throw FormatError("network file: 'layers' must be an array");

    Network net;
    net.name = doc["name"].get<std::string>();
    std::size_t i = 0;
    for (const auto& jl : doc["layers"]) {
        if (!jl.is_object()) throw FormatError("layer " + std::to_string(i) + ": must be an object");
        for (const auto& [key, _] : jl.items())
            if (!layer_keys.count(key))
                throw FormatError("layer " + std::to_string(i) + ": unknown field '" + key + "'");
        net.layers.push_back(make_layer(static_cast<int>(i), require_int(jl, "R", i),
                                        require_int(jl, "C", i), require_int(jl, "D", i),
                                        require_int(jl, "K", i), require_int(jl, "stride", i),
                                        require_int(jl, "pad", i)));
        ++i;
    }
    return net;
}

Network load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open network file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_network_json(ss.str());
}

std::string network_to_json(const Network& net) {
    nlohmann::ordered_json doc;
    doc["name"] = net.name;
    doc["layers"] = nlohmann::ordered_json::array();
    for (const LayerShape& l : net.layers) {
        doc["layers"].push_back(
            {{"R", l.R}, {"C", l.C}, {"D", l.D}, {"K", l.K}, {"stride", l.stride}, {"pad", l.pad}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace dsc
