#include "coalbench/perf.hpp"

#include <cmath>
#include <cstdio>

#include "coalbench/errors.hpp"

namespace coalbench {

RooflinePoint roofline_point(double flops, double bytes, double elapsed,
                             const MachineModel& machine, Precision precision) {
    if (!(flops > 0.0) || !std::isfinite(flops))
        throw DomainError("roofline_point: flops must be > 0");
    if (!(bytes > 0.0) || !std::isfinite(bytes))
        throw DomainError("roofline_point: bytes must be > 0");
    if (!(elapsed > 0.0) || !std::isfinite(elapsed))
        throw DomainError("roofline_point: elapsed must be > 0");
    if (!(machine.peak_flops_double > 0.0) || !(machine.peak_flops_single > 0.0) ||
        !(machine.peak_bandwidth > 0.0))
        throw DomainError("roofline_point: machine peaks must be > 0");

    const double peak =
        precision == Precision::fp64 ? machine.peak_flops_double : machine.peak_flops_single;
    RooflinePoint pt;
    pt.ai = flops / bytes;
    pt.achieved = flops / elapsed;
    const double ramp = pt.ai * machine.peak_bandwidth;
    pt.memory_bound = ramp < peak;
    pt.bound = pt.memory_bound ? ramp : peak;
    return pt;
}

void PerfReport::record_phase(const PhaseRecord& fragment) {
    if (fragment.name.empty())
        throw DomainError("record_phase: phase name must not be empty");
    if (!(fragment.elapsed_s >= 0.0))
        throw DomainError("record_phase: elapsed must be >= 0");
    if (find(fragment.name) != nullptr)
        throw DomainError("record_phase: duplicate phase '" + fragment.name + "'");
    phases_.push_back(fragment);
}

const PhaseRecord* PerfReport::find(const std::string& name) const {
    for (const auto& p : phases_)
        if (p.name == name)
            return &p;
    return nullptr;
}

PhaseRecord PerfReport::totals() const {
    PhaseRecord t;
    t.name = "total";
    for (const auto& p : phases_) {
        t.elapsed_s += p.elapsed_s;
        t.kernel_evals += p.kernel_evals;
        t.est_flops += p.est_flops;
        t.est_bytes += p.est_bytes;
    }
    return t;
}

SpeedupLedger build_ledger(const std::vector<ScopeTimings>& timings) {
    SpeedupLedger ledger;
    for (const auto& scope : timings) {
        if (scope.timings.size() < 2)
            throw DomainError("build_ledger: scope '" + scope.scope +
                              "' needs at least two variant timings");
        ScopeLedger sl;
        sl.scope = scope.scope;
        for (std::size_t n = 0; n < scope.timings.size(); ++n) {
            const auto& [variant, time] = scope.timings[n];
            if (!(time > 0.0) || !std::isfinite(time))
                throw DomainError("build_ledger: nonpositive timing for variant '" + variant +
                                  "' in scope '" + scope.scope + "'");
            LedgerRow row;
            row.variant = variant;
            row.time_s = time;
            if (n > 0) {
                row.current_speedup = scope.timings[n - 1].second / time;
                row.cumulative_speedup = scope.timings[0].second / time;
            }
            sl.rows.push_back(row);
        }
        ledger.scopes.push_back(std::move(sl));
    }
    return ledger;
}

std::string format_ledger(const SpeedupLedger& ledger) {
    std::string out;
    if (ledger.scopes.empty())
        return out;
    const std::size_t nvariants = ledger.scopes.front().rows.size();
    char line[160];
    for (std::size_t n = 0; n < nvariants; ++n) {
        out += "variant: " + ledger.scopes.front().rows[n].variant + "\n";
        out += "  scope          time [s]    current speedup    cumulative speedup\n";
        for (const auto& scope : ledger.scopes) {
            if (n >= scope.rows.size())
                continue;
            const LedgerRow& row = scope.rows[n];
            std::snprintf(line, sizeof(line), "  %-12s %10.4f %14.2fx %20.2fx\n",
                          scope.scope.c_str(), row.time_s, row.current_speedup,
                          row.cumulative_speedup);
            out += line;
        }
    }
    return out;
}

} // namespace coalbench
