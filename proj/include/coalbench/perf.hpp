#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coalbench {

/// Peak rates for roofline placement. Defaults are an A100-class device:
/// 9.7/19.5 TFLOP/s double/single, 1555 GB/s.
struct MachineModel {
    double peak_flops_double = 9.7e12;
    double peak_flops_single = 19.5e12;
    double peak_bandwidth = 1555e9;
};

enum class Precision { fp32, fp64 };

struct RooflinePoint {
    double ai;       ///< arithmetic intensity [FLOP/B]
    double achieved; ///< flops / elapsed [FLOP/s]
    double bound;    ///< min(peak, ai * bandwidth) [FLOP/s]
    bool memory_bound;
};

/// Throws DomainError unless flops, bytes, elapsed and all machine peaks are
/// positive. memory_bound iff ai * bandwidth < peak for the precision.
RooflinePoint roofline_point(double flops, double bytes, double elapsed,
                             const MachineModel& machine, Precision precision);

/// Analytic per-event cost constants for the FLOP/byte estimates. These are
/// deterministic counting rules, not hardware measurements: an "eval" is one
/// kernel interpolation (weight apply: sub, mul, add, plus the two reference
/// loads), a "triple" is one (pair, i, j) visit of the pair loop.
namespace cost_model {
inline constexpr double kFlopsPerKernelEval = 5.0;
inline constexpr double kBytesPerKernelEval = 16.0;
/// extra store when the interpolation fills a precomputed table
inline constexpr double kBytesPerPrecomputeStore = 8.0;
/// rate product, timestep scale, loss updates, two-bin gain split
inline constexpr double kFlopsPerTriple = 10.0;
/// density loads, delta read-modify-writes, gain-table entry
inline constexpr double kBytesPerTriple = 48.0;
inline constexpr double kFlopsPerStubIter = 2.0;
inline constexpr double kBytesPerStubPoint = 16.0;
} // namespace cost_model

struct PhaseRecord {
    std::string name;
    double elapsed_s = 0.0;
    std::uint64_t kernel_evals = 0;
    double est_flops = 0.0;
    double est_bytes = 0.0;
};

/// Immutable append-only list of phase fragments for one run.
class PerfReport {
public:
    /// Throws DomainError on a duplicate phase name or negative elapsed.
    /// Zero elapsed is allowed; such phases are excluded from speedup
    /// denominators by the ledger assembly.
    void record_phase(const PhaseRecord& fragment);

    const std::vector<PhaseRecord>& phases() const { return phases_; }
    const PhaseRecord* find(const std::string& name) const;

    /// Sum of all fragments (name "total").
    PhaseRecord totals() const;

private:
    std::vector<PhaseRecord> phases_;
};

struct LedgerRow {
    std::string variant;
    double time_s = 0.0;
    double current_speedup = 1.0;    ///< previous variant time / this time
    double cumulative_speedup = 1.0; ///< first variant time / this time
};

struct ScopeLedger {
    std::string scope;
    std::vector<LedgerRow> rows;
};

struct SpeedupLedger {
    std::vector<ScopeLedger> scopes;
};

/// Ordered (variant, seconds) timings for one scope.
struct ScopeTimings {
    std::string scope;
    std::vector<std::pair<std::string, double>> timings;
};

/// Throws DomainError if a scope has fewer than two variants or a
/// nonpositive timing.
SpeedupLedger build_ledger(const std::vector<ScopeTimings>& timings);

/// Per-variant blocks with one row per scope, like the staged speedup tables.
std::string format_ledger(const SpeedupLedger& ledger);

} // namespace coalbench
