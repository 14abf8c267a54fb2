#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coalbench/coalescence.hpp"
#include "coalbench/kernels.hpp"
#include "coalbench/mass_grid.hpp"

namespace coalbench {

/// Temperature gate for the nucleation/condensation work [K].
inline constexpr double kOuterGateK = 193.15;
/// Temperature gate for collision-coalescence [K].
inline constexpr double kCoalGateK = 223.15;

/// Inclusive index ranges of the 3-D domain (i, k, j; k is the vertical).
struct Ranges {
    int ids = 1, ide = 1;
    int kds = 1, kde = 1;
    int jds = 1, jde = 1;

    int ni() const { return ide - ids + 1; }
    int nk() const { return kde - kds + 1; }
    int nj() const { return jde - jds + 1; }
    std::size_t npoints() const {
        return static_cast<std::size_t>(ni()) * nk() * nj();
    }
    bool operator==(const Ranges&) const = default;
};

/// The 3-D state: temperature, pressure and per-category bin densities at
/// every grid point. Scalars and bins are stored row-major in (i, k, j) with
/// j fastest; bins append the bin index as the fastest dimension.
struct GridState {
    Ranges ranges;
    MassGrid grid;
    std::vector<double> temperature; ///< [npoints] K
    std::vector<double> pressure;    ///< [npoints] hPa
    std::array<std::vector<double>, kNumCategories> bins; ///< [npoints * nkr] each

    int nkr() const { return grid.nkr(); }

    std::size_t point_index(int i, int k, int j) const {
        return (static_cast<std::size_t>(i - ranges.ids) * ranges.nk() + (k - ranges.kds)) *
                   ranges.nj() +
               (j - ranges.jds);
    }

    std::span<double> bins_at(int category, std::size_t point) {
        return {bins[category].data() + point * nkr(), static_cast<std::size_t>(nkr())};
    }
    std::span<const double> bins_at(int category, std::size_t point) const {
        return {bins[category].data() + point * nkr(), static_cast<std::size_t>(nkr())};
    }
};

/// True iff every extent, grid value, scalar field and bin value matches
/// bitwise.
bool bitwise_equal(const GridState& a, const GridState& b);

/// Two-level horizontal decomposition: patches partition the j range, tiles
/// partition the i range within each patch. Exact cover, pairwise disjoint.
struct PatchTilePlan {
    struct Tile {
        int its, ite;
        int jts, jte;
    };
    struct Patch {
        int ims, ime;
        int jms, jme;
        std::vector<Tile> tiles;
    };
    std::vector<Patch> patches;
};

/// Near-equal partition (sizes differ by at most one). Throws DomainError if
/// any patch or tile would be empty.
PatchTilePlan decompose(const Ranges& ranges, int n_patches, int n_tiles_per_patch);

/// Branch decisions of the fused loop, stored per grid point:
/// call_coal = (T > 193.15) && (T > 223.15).
struct PredicateMask {
    Ranges ranges;
    std::vector<std::uint8_t> call_coal;
    std::uint64_t true_count = 0;
};

/// Pure read of the state's temperatures.
PredicateMask fission_predicates(const GridState& state);

enum class StepMode { serial, parallel };

/// How a step executes: serial or thread-parallel, collapse depth of the
/// parallel iteration space, and the kernel/scratch strategies passed down
/// to coal_step. collapse=3 flattens (j,k,i) and requires the arena (the
/// per-call automatic arrays are what forbid the deeper collapse).
struct ExecPlan {
    StepMode mode = StepMode::serial;
    int collapse = 2;
    int threads = 1;
    KernelStrategy kernel_strategy = KernelStrategy::on_demand;
    ScratchStrategy scratch_strategy = ScratchStrategy::automatic;
};

/// Throws ConfigError on an invalid plan (collapse outside {2,3}, threads < 1,
/// or collapse=3 with automatic scratch).
void validate_plan(const ExecPlan& plan);

/// Synthetic-work knobs for the nucleation/condensation stand-ins. The spins
/// read state and write nothing; iteration counts set their cost relative to
/// a coal_step call.
struct StubParams {
    int nucleation_iters = 1200;
    int condensation_iters = 1200;
};

/// Accumulated wall-clock per phase [s].
struct PhaseTimings {
    double mask_s = 0.0;
    double stubs_s = 0.0;
    double coal_s = 0.0;
    double step_s = 0.0;
};

/// Shared monotonic work counters (relaxed; totals read after quiescence).
struct WorkCounters {
    CoalCounters coal;
    std::atomic<std::uint64_t> stub_points{0};
    /// wrapping sum of the spin results' bit patterns; order-independent, so
    /// it is identical for every thread count
    std::atomic<std::uint64_t> stub_checksum{0};
};

/// Everything a step needs besides the state itself.
struct StepContext {
    const KernelTableSet* tables = nullptr;
    const GainTable* gains = nullptr;
    CoalConfig coal; ///< dt and substeps; strategies are taken from the plan
    StubParams stubs;
    ScratchArena* arena = nullptr; ///< required for ScratchStrategy::arena
    WorkCounters* counters = nullptr;
    PhaseTimings* timings = nullptr;
    const PatchTilePlan* tiles = nullptr; ///< optional; whole domain if null
};

struct SyntheticCaseParams {
    int ni = 1, nk = 1, nj = 1;
    double cloud_fraction = 0.0;
    std::uint64_t seed = 0;
    int nkr = 33;
    double x1 = 3.35e-14; ///< kg, about a 2 um radius droplet
    double ratio = 2.0;
    double number_density = 1e6; ///< m^-3, scaled 0.5x..1.5x per point
};

/// Deterministic pseudo-random state: exactly round(cloud_fraction * npoints)
/// points are warm enough for coalescence and carry a liquid distribution;
/// the rest split between stub-only and fully-cold temperatures. Pressure
/// falls linearly from 900 hPa at kds to 400 hPa at kde so both interpolation
/// clamp regimes occur.
GridState make_synthetic_case(const SyntheticCaseParams& params);

/// One step of the fused baseline loop (j, k, i): where T > 193.15 the
/// nucleation and condensation stubs run; where additionally T > 223.15,
/// coal_step. Serial only. Stiffness errors carry grid coordinates.
void fused_step(GridState& state, const StepContext& ctx, const ExecPlan& plan);

/// One fissioned step: phase 1 runs the stubs everywhere the outer gate
/// holds; phase 2 runs coal_step at exactly the mask-true points, scheduled
/// per plan (collapse 2: threads over flattened (j,k), serial i inside;
/// collapse 3: threads over flattened (j,k,i)). Bitwise equal to fused_step
/// for every plan and thread count.
void fissioned_step(GridState& state, const PredicateMask& mask, const StepContext& ctx,
                    const ExecPlan& plan);

} // namespace coalbench
