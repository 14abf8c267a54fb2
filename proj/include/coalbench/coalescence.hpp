#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coalbench/kernels.hpp"
#include "coalbench/mass_grid.hpp"

namespace coalbench {

enum class KernelStrategy {
    precomputed, ///< fill all pair tables for the point's pressure, then read
    on_demand,   ///< interpolate each entry where it is used
};

enum class ScratchStrategy {
    automatic, ///< per-call working arrays
    arena,     ///< preallocated per-gridpoint slices
};

std::optional<KernelStrategy> kernel_strategy_from_name(std::string_view name);
std::optional<ScratchStrategy> scratch_strategy_from_name(std::string_view name);
const char* kernel_strategy_name(KernelStrategy s);
const char* scratch_strategy_name(ScratchStrategy s);

struct CoalConfig {
    double dt = 1.0; ///< step length [s], split into substeps
    int substeps = 1;
    KernelStrategy kernel_strategy = KernelStrategy::on_demand;
    ScratchStrategy scratch_strategy = ScratchStrategy::automatic;
};

/// Mutable view of one grid point's per-category bin densities.
struct PointState {
    std::array<std::span<double>, kNumCategories> n;
};

/// Deposition plan for the coalesced mass m = x_i + x_j, precomputed once per
/// grid. Either m falls between two bins (Kovetz-Olund split, conserving both
/// number and mass) or at/above the top bin (mass-conserving top rule).
class GainTable {
public:
    struct Entry {
        std::int32_t lo;   ///< lower gain bin; -1 for the top-bin rule
        double w_lo = 0.0; ///< (x[lo+1] - m) / (x[lo+1] - x[lo])
        double w_hi = 0.0; ///< (m - x[lo]) / (x[lo+1] - x[lo])
        double top_factor = 0.0; ///< m / x[nkr-1] when lo == -1
    };

    explicit GainTable(const MassGrid& grid);

    const Entry& at(int i, int j) const { return entries_[static_cast<std::size_t>(i) * nkr_ + j]; }
    int nkr() const { return nkr_; }

private:
    int nkr_;
    std::vector<Entry> entries_;
};

/// Work performed by coal_step, for the perf module. Relaxed atomics; exact
/// totals are read after quiescence.
struct CoalCounters {
    std::atomic<std::uint64_t> triples{0}; ///< (pair, i, j) visits across substeps
    std::atomic<std::uint64_t> points{0};  ///< coal_step calls
};

/// Named per-gridpoint working storage, allocated once per run. Slices for
/// distinct grid points are disjoint by construction, so concurrent coal_step
/// calls on distinct points need no synchronization.
class ScratchArena {
public:
    static constexpr int kIceMax = 3;

    ScratchArena(int ni, int nk, int nj, int nkr, int icemax);

    int ni() const { return ni_; }
    int nk() const { return nk_; }
    int nj() const { return nj_; }
    int nkr() const { return nkr_; }
    int icemax() const { return icemax_; }

    /// Per-point view of the named array (relative point coordinates).
    std::span<double> array(std::string_view name, int i_rel, int k_rel, int j_rel);

    std::vector<std::string> array_names() const;
    std::size_t array_elements(std::string_view name) const;
    std::size_t total_bytes() const;

    struct Slice; // role-mapped spans, defined below

    Slice slice(int i_rel, int k_rel, int j_rel);

private:
    struct Block {
        std::string name;
        int per_point;
        std::vector<double> data;
    };

    const Block& find(std::string_view name) const;
    std::size_t point_offset(int i_rel, int k_rel, int j_rel) const;

    int ni_, nk_, nj_, nkr_, icemax_;
    std::vector<Block> blocks_;
};

/// Working copies and delta accumulators for one grid point, one span per
/// category. Backed either by arena slices or by per-call storage.
struct ScratchArena::Slice {
    std::array<std::span<double>, kNumCategories> work;
    std::array<std::span<double>, kNumCategories> delta;
};

using ScratchSlice = ScratchArena::Slice;

/// Throws AllocationError with the required byte count if the arena does not
/// fit in memory; DomainError on extents < 1.
ScratchArena allocate_arena(int ni, int nk, int nj, int nkr, int icemax);

/// Everything coal_step needs besides the per-point state: grid, kernel
/// tables, the per-grid gain table, and optional counters.
struct CoalContext {
    const MassGrid* grid = nullptr;
    const KernelTableSet* tables = nullptr;
    const GainTable* gains = nullptr;
    CoalCounters* counters = nullptr;
};

/// Advances one grid point's distributions by cfg.dt, split into
/// cfg.substeps Jacobi substeps: all pair rates within a substep are computed
/// from beginning-of-substep densities, so results do not depend on pair
/// iteration order beyond the fixed normative one (registry order, i outer,
/// j inner; self-pairs iterate j >= i with the diagonal rate halved).
///
/// A pair whose collecting category (source_a) holds no particles is skipped;
/// every skipped contribution is exactly zero, so skipping never changes
/// results. Throws StiffnessError if any bin would become negative.
///
/// `scratch` is required for ScratchStrategy::arena. `precomputed` is an
/// optional reusable buffer for KernelStrategy::precomputed; it is refilled
/// (overwritten) on every call.
void coal_step(const PointState& state, double pressure, const CoalConfig& cfg,
               const CoalContext& ctx, ScratchSlice* scratch = nullptr,
               PrecomputedKernels* precomputed = nullptr);

} // namespace coalbench
