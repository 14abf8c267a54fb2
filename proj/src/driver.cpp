#include "coalbench/driver.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <utility>

#include "coalbench/errors.hpp"
#include "coalbench/rng.hpp"

namespace coalbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Dependent multiply-add chain; cannot be folded away because the result
/// feeds the checksum.
double stub_spin(double x, int iters) {
    double acc = x;
    for (int it = 0; it < iters; ++it)
        acc = acc * 1.0000000001 + 1e-12;
    return acc;
}

std::vector<std::pair<int, int>> split_range(int lo, int hi, int parts, const char* what) {
    const int extent = hi - lo + 1;
    if (parts < 1 || parts > extent)
        throw DomainError(std::string("decompose: ") + what + " count " + std::to_string(parts) +
                          " does not fit extent " + std::to_string(extent));
    std::vector<std::pair<int, int>> out;
    out.reserve(parts);
    const int base = extent / parts;
    const int rem = extent % parts;
    int start = lo;
    for (int p = 0; p < parts; ++p) {
        const int len = base + (p < rem ? 1 : 0);
        out.emplace_back(start, start + len - 1);
        start += len;
    }
    return out;
}

/// Static contiguous chunking of [0, total) over `threads` workers. Runs
/// inline when one worker suffices; otherwise joins all workers and rethrows
/// the first captured exception (lowest worker index).
void run_chunks(std::size_t total, int threads,
                const std::function<void(int, std::size_t, std::size_t)>& body) {
    if (total == 0)
        return;
    if (threads <= 1) {
        body(0, 0, total);
        return;
    }
    const int nw = threads;
    std::vector<std::exception_ptr> errors(nw);
    std::vector<std::thread> workers;
    workers.reserve(nw);
    for (int w = 0; w < nw; ++w) {
        const std::size_t begin = total * static_cast<std::size_t>(w) / nw;
        const std::size_t end = total * static_cast<std::size_t>(w + 1) / nw;
        workers.emplace_back([&, w, begin, end] {
            try {
                body(w, begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

PatchTilePlan whole_domain_plan(const Ranges& r) {
    PatchTilePlan plan;
    PatchTilePlan::Patch patch{r.ids, r.ide, r.jds, r.jde, {}};
    patch.tiles.push_back({r.ids, r.ide, r.jds, r.jde});
    plan.patches.push_back(std::move(patch));
    return plan;
}

/// Per-worker state for stepping one point.
struct PointWorker {
    GridState* state;
    const StepContext* ctx;
    CoalConfig cfg;
    CoalContext cctx;
    PrecomputedKernels pk; // reused across points within this worker

    void coal_at(int i, int k, int j) {
        const std::size_t p = state->point_index(i, k, j);
        PointState ps;
        for (int c = 0; c < kNumCategories; ++c)
            ps.n[c] = state->bins_at(c, p);
        ScratchSlice slice;
        ScratchSlice* slice_ptr = nullptr;
        if (cfg.scratch_strategy == ScratchStrategy::arena) {
            slice = ctx->arena->slice(i - state->ranges.ids, k - state->ranges.kds,
                                      j - state->ranges.jds);
            slice_ptr = &slice;
        }
        try {
            coal_step(ps, state->pressure[p], cfg, cctx, slice_ptr, &pk);
        } catch (const StiffnessError& e) {
            throw e.at_point(i, k, j);
        }
    }
};

void check_arena(const StepContext& ctx, const GridState& state, const ExecPlan& plan) {
    if (plan.scratch_strategy != ScratchStrategy::arena)
        return;
    if (ctx.arena == nullptr)
        throw ConfigError("step: arena scratch strategy requires an allocated arena");
    if (ctx.arena->ni() != state.ranges.ni() || ctx.arena->nk() != state.ranges.nk() ||
        ctx.arena->nj() != state.ranges.nj() || ctx.arena->nkr() != state.nkr())
        throw ShapeError("step: arena extents do not match the state");
}

CoalConfig effective_coal_config(const StepContext& ctx, const ExecPlan& plan) {
    CoalConfig cfg = ctx.coal;
    cfg.kernel_strategy = plan.kernel_strategy;
    cfg.scratch_strategy = plan.scratch_strategy;
    return cfg;
}

/// Runs the nucleation/condensation stand-ins for every point with
/// T > 193.15 in [begin, end) of the flattened (j,k) row space, accumulating
/// checksum and point count locally before one atomic add.
void stub_rows(GridState& state, const StepContext& ctx, std::size_t begin, std::size_t end) {
    const Ranges& r = state.ranges;
    const int nk = r.nk();
    std::uint64_t checksum = 0;
    std::uint64_t npts = 0;
    for (std::size_t u = begin; u < end; ++u) {
        const int j = r.jds + static_cast<int>(u / nk);
        const int k = r.kds + static_cast<int>(u % nk);
        for (int i = r.ids; i <= r.ide; ++i) {
            const std::size_t p = state.point_index(i, k, j);
            const double t = state.temperature[p];
            if (t > kOuterGateK) {
                const double nucl = stub_spin(t * 1e-3, ctx.stubs.nucleation_iters);
                const double cond =
                    stub_spin(t * 1e-3 + state.pressure[p] * 1e-4, ctx.stubs.condensation_iters);
                checksum += std::bit_cast<std::uint64_t>(nucl);
                checksum += std::bit_cast<std::uint64_t>(cond);
                ++npts;
            }
        }
    }
    if (ctx.counters != nullptr) {
        ctx.counters->stub_checksum.fetch_add(checksum, std::memory_order_relaxed);
        ctx.counters->stub_points.fetch_add(npts, std::memory_order_relaxed);
    }
}

} // namespace

bool bitwise_equal(const GridState& a, const GridState& b) {
    if (!(a.ranges == b.ranges) || a.nkr() != b.nkr())
        return false;
    auto eq = [](const std::vector<double>& u, const std::vector<double>& v) {
        return u.size() == v.size() &&
               std::memcmp(u.data(), v.data(), u.size() * sizeof(double)) == 0;
    };
    if (!eq(a.grid.x, b.grid.x) || !eq(a.temperature, b.temperature) ||
        !eq(a.pressure, b.pressure))
        return false;
    for (int c = 0; c < kNumCategories; ++c)
        if (!eq(a.bins[c], b.bins[c]))
            return false;
    return true;
}

PatchTilePlan decompose(const Ranges& ranges, int n_patches, int n_tiles_per_patch) {
    PatchTilePlan plan;
    for (auto [jlo, jhi] : split_range(ranges.jds, ranges.jde, n_patches, "patch")) {
        PatchTilePlan::Patch patch{ranges.ids, ranges.ide, jlo, jhi, {}};
        for (auto [ilo, ihi] : split_range(ranges.ids, ranges.ide, n_tiles_per_patch, "tile"))
            patch.tiles.push_back({ilo, ihi, jlo, jhi});
        plan.patches.push_back(std::move(patch));
    }
    return plan;
}

PredicateMask fission_predicates(const GridState& state) {
    PredicateMask mask;
    mask.ranges = state.ranges;
    mask.call_coal.resize(state.ranges.npoints());
    std::uint64_t count = 0;
    for (std::size_t p = 0; p < mask.call_coal.size(); ++p) {
        const double t = state.temperature[p];
        const bool on = t > kOuterGateK && t > kCoalGateK;
        mask.call_coal[p] = on ? 1 : 0;
        count += on ? 1 : 0;
    }
    mask.true_count = count;
    return mask;
}

void validate_plan(const ExecPlan& plan) {
    if (plan.collapse != 2 && plan.collapse != 3)
        throw ConfigError("exec plan: collapse must be 2 or 3");
    if (plan.threads < 1)
        throw ConfigError("exec plan: threads must be >= 1");
    if (plan.collapse == 3 && plan.scratch_strategy == ScratchStrategy::automatic)
        throw ConfigError("exec plan: collapse=3 requires the arena scratch strategy "
                          "(per-call automatic arrays forbid the full collapse)");
}

GridState make_synthetic_case(const SyntheticCaseParams& params) {
    if (params.ni < 1 || params.nk < 1 || params.nj < 1)
        throw DomainError("make_synthetic_case: extents must be >= 1");
    if (!(params.cloud_fraction >= 0.0 && params.cloud_fraction <= 1.0))
        throw DomainError("make_synthetic_case: cloud_fraction must be in [0, 1]");
    if (!(params.number_density >= 0.0) || !std::isfinite(params.number_density))
        throw DomainError("make_synthetic_case: number_density must be >= 0");

    GridState state;
    state.ranges = Ranges{1, params.ni, 1, params.nk, 1, params.nj};
    state.grid = make_mass_grid(params.nkr, params.x1, params.ratio);

    const std::size_t npoints = state.ranges.npoints();
    state.temperature.resize(npoints);
    state.pressure.resize(npoints);
    for (auto& b : state.bins)
        b.assign(npoints * static_cast<std::size_t>(params.nkr), 0.0);

    // exactly round(fraction * npoints) cloudy points, chosen by a seeded
    // shuffle so the layout is scattered but reproducible
    const auto n_cloudy =
        static_cast<std::size_t>(std::llround(params.cloud_fraction * static_cast<double>(npoints)));
    SplitMix64 rng(params.seed);
    std::vector<std::uint32_t> perm(npoints);
    for (std::size_t p = 0; p < npoints; ++p)
        perm[p] = static_cast<std::uint32_t>(p);
    for (std::size_t p = npoints - 1; p > 0; --p)
        std::swap(perm[p], perm[rng.bounded(p + 1)]);
    std::vector<std::uint8_t> cloudy(npoints, 0);
    for (std::size_t c = 0; c < n_cloudy; ++c)
        cloudy[perm[c]] = 1;

    for (std::size_t p = 0; p < npoints; ++p) {
        if (cloudy[p]) {
            state.temperature[p] = 240.0 + 60.0 * rng.uniform01();
        } else {
            // half stub-only (outer gate open), half fully cold
            state.temperature[p] = (rng.next() & 1) ? 210.0 : 180.0;
        }
    }

    // pressure profile: 900 hPa at the bottom level to 400 hPa at the top
    const int nk = params.nk;
    const Ranges& r = state.ranges;
    for (int i = r.ids; i <= r.ide; ++i)
        for (int k = r.kds; k <= r.kde; ++k)
            for (int j = r.jds; j <= r.jde; ++j) {
                const double frac = nk > 1 ? static_cast<double>(k - r.kds) / (nk - 1) : 0.0;
                state.pressure[state.point_index(i, k, j)] = 900.0 + (400.0 - 900.0) * frac;
            }

    const int liquid = static_cast<int>(Category::liquid);
    const double xbar = state.grid.x[std::min(params.nkr - 1, params.nkr / 3)];
    for (std::size_t p = 0; p < npoints; ++p) {
        if (!cloudy[p])
            continue;
        const double n_total = params.number_density * (0.5 + rng.uniform01());
        BinDistribution dist = exponential_init(state.grid, n_total, xbar);
        std::memcpy(state.bins[liquid].data() + p * static_cast<std::size_t>(params.nkr),
                    dist.n.data(), sizeof(double) * params.nkr);
    }
    return state;
}

void fused_step(GridState& state, const StepContext& ctx, const ExecPlan& plan) {
    validate_plan(plan);
    if (plan.mode != StepMode::serial)
        throw DomainError("fused_step: the fused loop is the serial baseline; "
                          "use fissioned_step for parallel plans");
    if (ctx.tables == nullptr || ctx.gains == nullptr)
        throw DomainError("fused_step: context must supply tables and gains");
    check_arena(ctx, state, plan);

    const auto step_t0 = Clock::now();
    PointWorker worker{&state, &ctx, effective_coal_config(ctx, plan),
                       CoalContext{&state.grid, ctx.tables, ctx.gains,
                                   ctx.counters ? &ctx.counters->coal : nullptr},
                       {}};

    double stubs_s = 0.0;
    double coal_s = 0.0;
    std::uint64_t checksum = 0;
    std::uint64_t stub_pts = 0;
    const PatchTilePlan* tiles = ctx.tiles;
    PatchTilePlan fallback;
    if (tiles == nullptr) {
        fallback = whole_domain_plan(state.ranges);
        tiles = &fallback;
    }

    for (const auto& patch : tiles->patches) {
        for (const auto& tile : patch.tiles) {
            for (int j = tile.jts; j <= tile.jte; ++j) {
                for (int k = state.ranges.kds; k <= state.ranges.kde; ++k) {
                    for (int i = tile.its; i <= tile.ite; ++i) {
                        const std::size_t p = state.point_index(i, k, j);
                        const double t = state.temperature[p];
                        if (!(t > kOuterGateK))
                            continue;
                        const auto t0 = Clock::now();
                        const double nucl =
                            stub_spin(t * 1e-3, ctx.stubs.nucleation_iters);
                        const double cond = stub_spin(t * 1e-3 + state.pressure[p] * 1e-4,
                                                      ctx.stubs.condensation_iters);
                        checksum += std::bit_cast<std::uint64_t>(nucl);
                        checksum += std::bit_cast<std::uint64_t>(cond);
                        ++stub_pts;
                        const auto t1 = Clock::now();
                        stubs_s += std::chrono::duration<double>(t1 - t0).count();
                        if (t > kCoalGateK) {
                            worker.coal_at(i, k, j);
                            coal_s += seconds_since(t1);
                        }
                    }
                }
            }
        }
    }

    if (ctx.counters != nullptr) {
        ctx.counters->stub_checksum.fetch_add(checksum, std::memory_order_relaxed);
        ctx.counters->stub_points.fetch_add(stub_pts, std::memory_order_relaxed);
    }
    if (ctx.timings != nullptr) {
        ctx.timings->stubs_s += stubs_s;
        ctx.timings->coal_s += coal_s;
        ctx.timings->step_s += seconds_since(step_t0);
    }
}

void fissioned_step(GridState& state, const PredicateMask& mask, const StepContext& ctx,
                    const ExecPlan& plan) {
    validate_plan(plan);
    if (ctx.tables == nullptr || ctx.gains == nullptr)
        throw DomainError("fissioned_step: context must supply tables and gains");
    check_arena(ctx, state, plan);
    if (!(mask.ranges == state.ranges))
        throw ShapeError("fissioned_step: mask extents do not match the state");
    for (std::size_t p = 0; p < mask.call_coal.size(); ++p) {
        const double t = state.temperature[p];
        const bool expect = t > kOuterGateK && t > kCoalGateK;
        if (static_cast<bool>(mask.call_coal[p]) != expect)
            throw DomainError("fissioned_step: mask is inconsistent with the state's "
                              "temperatures (stale predicate)");
    }

    const auto step_t0 = Clock::now();
    const Ranges& r = state.ranges;
    const int threads = plan.mode == StepMode::parallel ? plan.threads : 1;

    // phase 1: stubs wherever the outer gate holds
    {
        const auto t0 = Clock::now();
        const std::size_t rows = static_cast<std::size_t>(r.nj()) * r.nk();
        run_chunks(rows, threads,
                   [&](int, std::size_t b, std::size_t e) { stub_rows(state, ctx, b, e); });
        if (ctx.timings != nullptr)
            ctx.timings->stubs_s += seconds_since(t0);
    }

    // phase 2: coal_step at exactly the mask-true points
    {
        const auto t0 = Clock::now();
        const CoalConfig cfg = effective_coal_config(ctx, plan);
        const CoalContext cctx{&state.grid, ctx.tables, ctx.gains,
                               ctx.counters ? &ctx.counters->coal : nullptr};
        const PatchTilePlan* tiles = ctx.tiles;
        PatchTilePlan fallback;
        if (tiles == nullptr) {
            fallback = whole_domain_plan(state.ranges);
            tiles = &fallback;
        }
        const int nk = r.nk();

        for (const auto& patch : tiles->patches) {
            for (const auto& tile : patch.tiles) {
                const int ti = tile.ite - tile.its + 1;
                const std::size_t rows = static_cast<std::size_t>(tile.jte - tile.jts + 1) * nk;
                const std::size_t units =
                    plan.collapse == 3 ? rows * static_cast<std::size_t>(ti) : rows;

                run_chunks(units, threads, [&](int, std::size_t b, std::size_t e) {
                    PointWorker worker{&state, &ctx, cfg, cctx, {}};
                    if (plan.collapse == 3) {
                        const std::size_t inner = static_cast<std::size_t>(nk) * ti;
                        for (std::size_t u = b; u < e; ++u) {
                            const int j = tile.jts + static_cast<int>(u / inner);
                            const std::size_t rem = u % inner;
                            const int k = r.kds + static_cast<int>(rem / ti);
                            const int i = tile.its + static_cast<int>(rem % ti);
                            if (mask.call_coal[state.point_index(i, k, j)])
                                worker.coal_at(i, k, j);
                        }
                    } else {
                        for (std::size_t u = b; u < e; ++u) {
                            const int j = tile.jts + static_cast<int>(u / nk);
                            const int k = r.kds + static_cast<int>(u % nk);
                            for (int i = tile.its; i <= tile.ite; ++i)
                                if (mask.call_coal[state.point_index(i, k, j)])
                                    worker.coal_at(i, k, j);
                        }
                    }
                });
            }
        }
        if (ctx.timings != nullptr)
            ctx.timings->coal_s += seconds_since(t0);
    }

    if (ctx.timings != nullptr)
        ctx.timings->step_s += seconds_since(step_t0);
}

} // namespace coalbench
