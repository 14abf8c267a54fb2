#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalbench/config.hpp"
#include "coalbench/driver.hpp"
#include "coalbench/perf.hpp"

namespace coalbench {

/// Plain (non-atomic) snapshot of the work counters after a run.
struct WorkCounts {
    std::uint64_t kernel_evals = 0;
    std::uint64_t coal_triples = 0;
    std::uint64_t coal_points = 0;
    std::uint64_t stub_points = 0;
    std::uint64_t stub_checksum = 0;
};

struct RunArtifacts {
    GridState final_state;
    std::uint64_t mask_true = 0;
    std::uint64_t mask_total = 0;
    PhaseTimings timings;
    WorkCounts counts;
    /// wall time from state-ready to final state (arena allocation, mask,
    /// all steps); file I/O excluded
    double overall_s = 0.0;
};

/// The deterministic initial state for this config (what cmd_gen writes).
GridState generate_initial_state(const RunConfig& config);

/// Generates the initial state and steps it config.steps times under the
/// given variant. Each call is independent and reproducible.
RunArtifacts run_variant(const RunConfig& config, const VariantSpec& spec);

/// Phase records with the analytic FLOP/byte estimates filled in from the
/// counters (see perf.hpp cost_model).
PerfReport make_perf_report(const RunConfig& config, const VariantSpec& spec,
                            const RunArtifacts& artifacts);

/// Machine-readable per-run report (schema "coalbench-report/1").
nlohmann::json run_report_json(const RunConfig& config, const VariantSpec& spec,
                               const RunArtifacts& artifacts);

struct BenchScopeTimes {
    double coal_loop = 0.0;
    double sbm_step = 0.0;
    double overall = 0.0;
};

struct BenchResult {
    std::vector<std::string> variants;
    std::vector<BenchScopeTimes> best; ///< min over repeats, per variant
    SpeedupLedger ledger;
    nlohmann::json report;
};

/// Runs every configured bench variant config.bench_repeats times, keeps the
/// per-scope minima, and assembles the three-scope speedup ledger plus
/// roofline points. Requires at least two bench variants.
BenchResult run_bench(const RunConfig& config);

} // namespace coalbench
