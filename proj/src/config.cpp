#include "coalbench/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "coalbench/errors.hpp"

namespace coalbench {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (allowed.find(key) == allowed.end())
            throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key))
        return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + std::string(key) + "': " + e.what());
    }
}

Category parse_category(const json& j, const char* key) {
    const auto name = j.at(key).get<std::string>();
    auto cat = category_from_name(name);
    if (!cat)
        throw ConfigError("config: unknown category '" + name + "'");
    return *cat;
}

std::pair<int, int> line_and_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t p = 0; p < byte && p < text.size(); ++p) {
        if (text[p] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

VariantSpec variant_spec(const std::string& name, int threads) {
    VariantSpec spec;
    spec.name = name;
    spec.plan.threads = threads;
    if (name == "baseline-fused-precomputed") {
        spec.fissioned = false;
        spec.plan.mode = StepMode::serial;
        spec.plan.threads = 1;
        spec.plan.kernel_strategy = KernelStrategy::precomputed;
        spec.plan.scratch_strategy = ScratchStrategy::automatic;
    } else if (name == "ondemand-fused") {
        spec.fissioned = false;
        spec.plan.mode = StepMode::serial;
        spec.plan.threads = 1;
        spec.plan.kernel_strategy = KernelStrategy::on_demand;
        spec.plan.scratch_strategy = ScratchStrategy::automatic;
    } else if (name == "fissioned-collapse2") {
        spec.fissioned = true;
        spec.plan.mode = StepMode::parallel;
        spec.plan.collapse = 2;
        spec.plan.kernel_strategy = KernelStrategy::on_demand;
        spec.plan.scratch_strategy = ScratchStrategy::automatic;
    } else if (name == "fissioned-collapse3-arena") {
        spec.fissioned = true;
        spec.plan.mode = StepMode::parallel;
        spec.plan.collapse = 3;
        spec.plan.kernel_strategy = KernelStrategy::on_demand;
        spec.plan.scratch_strategy = ScratchStrategy::arena;
    } else {
        throw ConfigError("unknown variant '" + name + "'; expected one of " +
                          [] {
                              std::string all;
                              for (const auto& v : known_variants())
                                  all += (all.empty() ? "" : ", ") + v;
                              return all;
                          }());
    }
    validate_plan(spec.plan);
    return spec;
}

std::vector<std::string> known_variants() {
    return {"baseline-fused-precomputed", "ondemand-fused", "fissioned-collapse2",
            "fissioned-collapse3-arena"};
}

void validate_config(const RunConfig& c) {
    const auto& s = c.synthetic;
    if (s.ni < 1 || s.nk < 1 || s.nj < 1)
        throw ConfigError("config: synthetic extents must be >= 1");
    if (!(s.cloud_fraction >= 0.0 && s.cloud_fraction <= 1.0))
        throw ConfigError("config: cloud_fraction must be in [0, 1]");
    if (s.nkr < 2)
        throw ConfigError("config: nkr must be >= 2");
    if (!(s.x1 > 0.0) || !(s.ratio > 1.0))
        throw ConfigError("config: mass grid needs x1 > 0 and ratio > 1");
    if (!(s.number_density >= 0.0))
        throw ConfigError("config: number_density must be >= 0");

    if (!(c.kernel.coeff >= 0.0) || !std::isfinite(c.kernel.coeff))
        throw ConfigError("config: kernel coeff must be finite and >= 0");
    if (!(c.kernel.level_scale >= 0.0) || !(c.kernel.pair_scale_step >= 0.0))
        throw ConfigError("config: kernel scales must be >= 0");
    validate_registry(c.pairs, c.pairs_overridden);

    if (!(c.dt > 0.0))
        throw ConfigError("config: dt must be > 0");
    if (c.substeps < 1)
        throw ConfigError("config: substeps must be >= 1");
    if (c.steps < 0)
        throw ConfigError("config: steps must be >= 0");
    if (c.threads < 1)
        throw ConfigError("config: threads must be >= 1");
    if (c.patches < 1 || c.patches > s.nj)
        throw ConfigError("config: patches must be in 1.." + std::to_string(s.nj));
    if (c.tiles < 1 || c.tiles > s.ni)
        throw ConfigError("config: tiles must be in 1.." + std::to_string(s.ni));
    if (c.stubs.nucleation_iters < 0 || c.stubs.condensation_iters < 0)
        throw ConfigError("config: stub iteration counts must be >= 0");
    if (!(c.machine.peak_flops_double > 0.0) || !(c.machine.peak_flops_single > 0.0) ||
        !(c.machine.peak_bandwidth > 0.0))
        throw ConfigError("config: machine peaks must be > 0");
    if (c.bench_repeats < 1)
        throw ConfigError("config: bench repeats must be >= 1");

    variant_spec(c.variant, c.threads);
    for (const auto& entry : c.bench_variants)
        variant_spec(entry.variant, entry.threads > 0 ? entry.threads : c.threads);
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    check_keys(j, "config root",
               {"synthetic", "kernel", "run", "stubs", "machine", "bench", "output"});

    if (j.contains("synthetic")) {
        const json& s = j.at("synthetic");
        check_keys(s, "synthetic",
                   {"ni", "nk", "nj", "cloud_fraction", "seed", "nkr", "x1", "ratio",
                    "number_density"});
        c.synthetic.ni = get_or(s, "ni", c.synthetic.ni);
        c.synthetic.nk = get_or(s, "nk", c.synthetic.nk);
        c.synthetic.nj = get_or(s, "nj", c.synthetic.nj);
        c.synthetic.cloud_fraction = get_or(s, "cloud_fraction", c.synthetic.cloud_fraction);
        c.synthetic.seed = get_or(s, "seed", c.synthetic.seed);
        c.synthetic.nkr = get_or(s, "nkr", c.synthetic.nkr);
        c.synthetic.x1 = get_or(s, "x1", c.synthetic.x1);
        c.synthetic.ratio = get_or(s, "ratio", c.synthetic.ratio);
        c.synthetic.number_density = get_or(s, "number_density", c.synthetic.number_density);
    }

    if (j.contains("kernel")) {
        const json& k = j.at("kernel");
        check_keys(k, "kernel",
                   {"family", "coeff", "level_scale", "pair_scale_step", "pairs",
                    "allow_pair_count_override"});
        const auto family_name = get_or<std::string>(k, "family", "golovin");
        auto family = kernel_family_from_name(family_name);
        if (!family)
            throw ConfigError("config: unknown kernel family '" + family_name + "'");
        c.kernel.family = *family;
        c.kernel.coeff = get_or(k, "coeff", c.kernel.coeff);
        c.kernel.level_scale = get_or(k, "level_scale", c.kernel.level_scale);
        c.kernel.pair_scale_step = get_or(k, "pair_scale_step", c.kernel.pair_scale_step);
        if (k.contains("pairs")) {
            c.pairs.clear();
            for (const json& p : k.at("pairs")) {
                check_keys(p, "kernel.pairs entry", {"id", "a", "b", "dest"});
                InteractionPair pair;
                pair.id = p.at("id").get<std::string>();
                pair.source_a = parse_category(p, "a");
                pair.source_b = parse_category(p, "b");
                pair.dest = parse_category(p, "dest");
                c.pairs.push_back(std::move(pair));
            }
        }
        c.pairs_overridden = get_or(k, "allow_pair_count_override", false);
    }

    if (j.contains("run")) {
        const json& r = j.at("run");
        check_keys(r, "run",
                   {"dt", "substeps", "steps", "variant", "threads", "patches", "tiles"});
        c.dt = get_or(r, "dt", c.dt);
        c.substeps = get_or(r, "substeps", c.substeps);
        c.steps = get_or(r, "steps", c.steps);
        c.variant = get_or<std::string>(r, "variant", c.variant);
        c.threads = get_or(r, "threads", c.threads);
        c.patches = get_or(r, "patches", c.patches);
        c.tiles = get_or(r, "tiles", c.tiles);
    }

    if (j.contains("stubs")) {
        const json& s = j.at("stubs");
        check_keys(s, "stubs", {"nucleation_iters", "condensation_iters"});
        c.stubs.nucleation_iters = get_or(s, "nucleation_iters", c.stubs.nucleation_iters);
        c.stubs.condensation_iters = get_or(s, "condensation_iters", c.stubs.condensation_iters);
    }

    if (j.contains("machine")) {
        const json& m = j.at("machine");
        check_keys(m, "machine", {"peak_flops_double", "peak_flops_single", "peak_bandwidth"});
        c.machine.peak_flops_double = get_or(m, "peak_flops_double", c.machine.peak_flops_double);
        c.machine.peak_flops_single = get_or(m, "peak_flops_single", c.machine.peak_flops_single);
        c.machine.peak_bandwidth = get_or(m, "peak_bandwidth", c.machine.peak_bandwidth);
    }

    if (j.contains("bench")) {
        const json& b = j.at("bench");
        check_keys(b, "bench", {"repeats", "variants"});
        c.bench_repeats = get_or(b, "repeats", c.bench_repeats);
        if (b.contains("variants")) {
            for (const json& v : b.at("variants")) {
                check_keys(v, "bench.variants entry", {"variant", "threads"});
                BenchEntry entry;
                entry.variant = v.at("variant").get<std::string>();
                entry.threads = get_or(v, "threads", 0);
                c.bench_variants.push_back(std::move(entry));
            }
        }
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, "output", {"snapshot", "report"});
        c.out_snapshot = get_or<std::string>(o, "snapshot", c.out_snapshot);
        c.out_report = get_or<std::string>(o, "report", c.out_report);
    }

    validate_config(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    json j;
    try {
        j = json::parse(text, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

json effective_config_json(const RunConfig& c) {
    json pairs = json::array();
    for (const auto& p : c.pairs)
        pairs.push_back({{"id", p.id},
                         {"a", category_name(p.source_a)},
                         {"b", category_name(p.source_b)},
                         {"dest", category_name(p.dest)}});
    json variants = json::array();
    for (const auto& b : c.bench_variants)
        variants.push_back({{"variant", b.variant}, {"threads", b.threads}});

    return json{
        {"synthetic",
         {{"ni", c.synthetic.ni},
          {"nk", c.synthetic.nk},
          {"nj", c.synthetic.nj},
          {"cloud_fraction", c.synthetic.cloud_fraction},
          {"seed", c.synthetic.seed},
          {"nkr", c.synthetic.nkr},
          {"x1", c.synthetic.x1},
          {"ratio", c.synthetic.ratio},
          {"number_density", c.synthetic.number_density}}},
        {"kernel",
         {{"family", kernel_family_name(c.kernel.family)},
          {"coeff", c.kernel.coeff},
          {"level_scale", c.kernel.level_scale},
          {"pair_scale_step", c.kernel.pair_scale_step},
          {"pairs", pairs},
          {"allow_pair_count_override", c.pairs_overridden}}},
        {"run",
         {{"dt", c.dt},
          {"substeps", c.substeps},
          {"steps", c.steps},
          {"variant", c.variant},
          {"threads", c.threads},
          {"patches", c.patches},
          {"tiles", c.tiles}}},
        {"stubs",
         {{"nucleation_iters", c.stubs.nucleation_iters},
          {"condensation_iters", c.stubs.condensation_iters}}},
        {"machine",
         {{"peak_flops_double", c.machine.peak_flops_double},
          {"peak_flops_single", c.machine.peak_flops_single},
          {"peak_bandwidth", c.machine.peak_bandwidth}}},
        {"bench", {{"repeats", c.bench_repeats}, {"variants", variants}}},
        {"output", {{"snapshot", c.out_snapshot}, {"report", c.out_report}}},
    };
}

} // namespace coalbench
