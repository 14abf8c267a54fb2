#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "coalbench/driver.hpp"
#include "coalbench/perf.hpp"

namespace coalbench {

/// One benchmark lane: a named variant, optionally pinning its thread count
/// (0 means "use run.threads").
struct BenchEntry {
    std::string variant;
    int threads = 0;
};

/// Everything a run needs, parsed and validated up front. See
/// docs/example-config.json for the annotated schema.
struct RunConfig {
    SyntheticCaseParams synthetic;
    KernelParams kernel;
    PairRegistry pairs = default_pair_registry();
    bool pairs_overridden = false;

    double dt = 1.0;
    int substeps = 1;
    int steps = 10;
    std::string variant = "baseline-fused-precomputed";
    int threads = 1;
    int patches = 1;
    int tiles = 1;

    StubParams stubs;
    MachineModel machine;

    int bench_repeats = 5;
    std::vector<BenchEntry> bench_variants;

    std::string out_snapshot = "state.snap";
    std::string out_report = "report.json";
};

/// The four named optimization stages.
struct VariantSpec {
    std::string name;
    bool fissioned = false;
    ExecPlan plan;
};

/// Throws ConfigError for an unknown variant name.
VariantSpec variant_spec(const std::string& name, int threads);
std::vector<std::string> known_variants();

/// Checks every module precondition the config feeds (extents, fraction,
/// kernel params, registry count, plan rules, machine peaks) before any run
/// starts. Throws ConfigError.
void validate_config(const RunConfig& config);

RunConfig config_from_json(const nlohmann::json& j);

/// Parses (JSON, // comments allowed) and validates. Parse failures carry
/// file, line and column. Throws ConfigError.
RunConfig load_config(const std::string& path);

/// Full round-trippable image of the effective config:
/// config_from_json(effective_config_json(c)) reproduces identical runs.
nlohmann::json effective_config_json(const RunConfig& config);

} // namespace coalbench
