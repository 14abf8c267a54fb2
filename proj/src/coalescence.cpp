#include "coalbench/coalescence.hpp"

#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "coalbench/errors.hpp"

namespace coalbench {

std::optional<KernelStrategy> kernel_strategy_from_name(std::string_view name) {
    if (name == "precomputed") return KernelStrategy::precomputed;
    if (name == "on_demand") return KernelStrategy::on_demand;
    return std::nullopt;
}

std::optional<ScratchStrategy> scratch_strategy_from_name(std::string_view name) {
    if (name == "automatic") return ScratchStrategy::automatic;
    if (name == "arena") return ScratchStrategy::arena;
    return std::nullopt;
}

const char* kernel_strategy_name(KernelStrategy s) {
    return s == KernelStrategy::precomputed ? "precomputed" : "on_demand";
}

const char* scratch_strategy_name(ScratchStrategy s) {
    return s == ScratchStrategy::automatic ? "automatic" : "arena";
}

// ---------------------------------------------------------------------------
// GainTable
// ---------------------------------------------------------------------------

GainTable::GainTable(const MassGrid& grid) : nkr_(grid.nkr()) {
    if (nkr_ < 2)
        throw DomainError("GainTable: grid must have at least 2 bins");
    entries_.resize(static_cast<std::size_t>(nkr_) * nkr_);

    const auto& x = grid.x;
    const double top = x[nkr_ - 1];
    const double inv_log_ratio = 1.0 / std::log(grid.ratio);
    const double log_x0 = std::log(x[0]);

    for (int i = 0; i < nkr_; ++i) {
        for (int j = 0; j < nkr_; ++j) {
            Entry& e = entries_[static_cast<std::size_t>(i) * nkr_ + j];
            const double m = x[i] + x[j];
            if (m >= top) {
                e.lo = -1;
                e.top_factor = m / top;
                continue;
            }
            // closed-form bracket for the geometric grid, then edge-corrected
            int k = static_cast<int>(std::floor((std::log(m) - log_x0) * inv_log_ratio));
            if (k < 0) k = 0;
            if (k > nkr_ - 2) k = nkr_ - 2;
            while (k + 1 < nkr_ - 1 && x[k + 1] <= m) ++k;
            while (k > 0 && x[k] > m) --k;
            e.lo = k;
            const double width = x[k + 1] - x[k];
            e.w_lo = (x[k + 1] - m) / width;
            e.w_hi = (m - x[k]) / width;
        }
    }
}

// ---------------------------------------------------------------------------
// ScratchArena
// ---------------------------------------------------------------------------

namespace {

struct ArraySpec {
    const char* name;
    bool per_ice; // per-point extent nkr * icemax instead of nkr
};

// g1/g2/g3/g4 hold the working copies (liquid, ice1..3, snow, graupel);
// fl1/fl2/fl3/fli hold the per-substep deltas (liquid, snow, graupel, ice1..3).
constexpr ArraySpec kArenaArrays[] = {
    {"fl1", false}, {"fl2", false}, {"fl3", false},
    {"g1", false},  {"g2", true},   {"g3", false},
    {"g4", false},  {"fli", true},
};

} // namespace

ScratchArena::ScratchArena(int ni, int nk, int nj, int nkr, int icemax)
    : ni_(ni), nk_(nk), nj_(nj), nkr_(nkr), icemax_(icemax) {
    if (ni < 1 || nk < 1 || nj < 1)
        throw DomainError("allocate_arena: grid extents must be >= 1");
    if (nkr < 1 || icemax < 1)
        throw DomainError("allocate_arena: nkr and icemax must be >= 1");

    const std::size_t npoints =
        static_cast<std::size_t>(ni) * static_cast<std::size_t>(nk) * static_cast<std::size_t>(nj);
    std::size_t required = 0;
    for (const auto& spec : kArenaArrays) {
        const std::size_t per_point = static_cast<std::size_t>(nkr) * (spec.per_ice ? icemax : 1);
        required += per_point * npoints * sizeof(double);
    }

    try {
        blocks_.reserve(std::size(kArenaArrays));
        for (const auto& spec : kArenaArrays) {
            const int per_point = nkr * (spec.per_ice ? icemax : 1);
            blocks_.push_back(Block{spec.name, per_point,
                                    std::vector<double>(static_cast<std::size_t>(per_point) * npoints)});
        }
    } catch (const std::bad_alloc&) {
        throw AllocationError("allocate_arena: cannot allocate scratch arena (" +
                                  std::to_string(required) + " bytes required)",
                              required);
    }
}

std::size_t ScratchArena::point_offset(int i_rel, int k_rel, int j_rel) const {
    if (i_rel < 0 || i_rel >= ni_ || k_rel < 0 || k_rel >= nk_ || j_rel < 0 || j_rel >= nj_)
        throw DomainError("ScratchArena: point (" + std::to_string(i_rel) + ", " +
                          std::to_string(k_rel) + ", " + std::to_string(j_rel) +
                          ") outside arena extents");
    return (static_cast<std::size_t>(i_rel) * nk_ + k_rel) * nj_ + j_rel;
}

const ScratchArena::Block& ScratchArena::find(std::string_view name) const {
    for (const auto& b : blocks_)
        if (b.name == name)
            return b;
    throw DomainError("ScratchArena: no array named '" + std::string(name) + "'");
}

std::span<double> ScratchArena::array(std::string_view name, int i_rel, int k_rel, int j_rel) {
    const Block& b = find(name);
    const std::size_t off = point_offset(i_rel, k_rel, j_rel) * b.per_point;
    return {const_cast<double*>(b.data.data()) + off, static_cast<std::size_t>(b.per_point)};
}

std::vector<std::string> ScratchArena::array_names() const {
    std::vector<std::string> names;
    names.reserve(blocks_.size());
    for (const auto& b : blocks_)
        names.push_back(b.name);
    return names;
}

std::size_t ScratchArena::array_elements(std::string_view name) const {
    return find(name).data.size();
}

std::size_t ScratchArena::total_bytes() const {
    std::size_t bytes = 0;
    for (const auto& b : blocks_)
        bytes += b.data.size() * sizeof(double);
    return bytes;
}

ScratchArena::Slice ScratchArena::slice(int i_rel, int k_rel, int j_rel) {
    if (icemax_ < 3)
        throw DomainError("ScratchArena: slice() needs icemax >= 3 for the ice categories");
    Slice s;
    auto sub = [this](std::span<double> block, int m) {
        return block.subspan(static_cast<std::size_t>(m) * nkr_, nkr_);
    };
    std::span<double> g2 = array("g2", i_rel, k_rel, j_rel);
    std::span<double> fli = array("fli", i_rel, k_rel, j_rel);

    s.work[static_cast<int>(Category::liquid)] = array("g1", i_rel, k_rel, j_rel);
    s.work[static_cast<int>(Category::ice1)] = sub(g2, 0);
    s.work[static_cast<int>(Category::ice2)] = sub(g2, 1);
    s.work[static_cast<int>(Category::ice3)] = sub(g2, 2);
    s.work[static_cast<int>(Category::snow)] = array("g3", i_rel, k_rel, j_rel);
    s.work[static_cast<int>(Category::graupel)] = array("g4", i_rel, k_rel, j_rel);

    s.delta[static_cast<int>(Category::liquid)] = array("fl1", i_rel, k_rel, j_rel);
    s.delta[static_cast<int>(Category::ice1)] = sub(fli, 0);
    s.delta[static_cast<int>(Category::ice2)] = sub(fli, 1);
    s.delta[static_cast<int>(Category::ice3)] = sub(fli, 2);
    s.delta[static_cast<int>(Category::snow)] = array("fl2", i_rel, k_rel, j_rel);
    s.delta[static_cast<int>(Category::graupel)] = array("fl3", i_rel, k_rel, j_rel);
    return s;
}

ScratchArena allocate_arena(int ni, int nk, int nj, int nkr, int icemax) {
    return ScratchArena(ni, nk, nj, nkr, icemax);
}

// ---------------------------------------------------------------------------
// coal_step
// ---------------------------------------------------------------------------

namespace {

bool all_zero(std::span<const double> v) {
    for (double x : v)
        if (x != 0.0)
            return false;
    return true;
}

} // namespace

void coal_step(const PointState& state, double pressure, const CoalConfig& cfg,
               const CoalContext& ctx, ScratchSlice* scratch, PrecomputedKernels* precomputed) {
    if (ctx.grid == nullptr || ctx.tables == nullptr || ctx.gains == nullptr)
        throw DomainError("coal_step: context must supply grid, tables and gains");
    if (!(cfg.dt > 0.0))
        throw DomainError("coal_step: dt must be > 0");
    if (cfg.substeps < 1)
        throw DomainError("coal_step: substeps must be >= 1");

    const int nkr = ctx.grid->nkr();
    if (ctx.tables->nkr() != nkr || ctx.gains->nkr() != nkr)
        throw ShapeError("coal_step: grid, tables and gain table disagree on nkr");
    for (const auto& span : state.n)
        if (static_cast<int>(span.size()) != nkr)
            throw ShapeError("coal_step: state distribution size does not match nkr");

    // Working storage: either the caller's arena slice or per-call arrays.
    ScratchSlice local;
    std::vector<double> local_buf;
    ScratchSlice* s = scratch;
    if (cfg.scratch_strategy == ScratchStrategy::arena) {
        if (scratch == nullptr)
            throw DomainError("coal_step: arena strategy requires a scratch slice");
        for (int c = 0; c < kNumCategories; ++c)
            if (static_cast<int>(scratch->work[c].size()) != nkr ||
                static_cast<int>(scratch->delta[c].size()) != nkr)
                throw ShapeError("coal_step: scratch slice size does not match nkr");
    } else {
        local_buf.resize(static_cast<std::size_t>(2 * kNumCategories) * nkr);
        for (int c = 0; c < kNumCategories; ++c) {
            local.work[c] = std::span<double>(local_buf.data() + c * nkr, nkr);
            local.delta[c] =
                std::span<double>(local_buf.data() + (kNumCategories + c) * nkr, nkr);
        }
        s = &local;
    }

    const bool on_demand = cfg.kernel_strategy == KernelStrategy::on_demand;
    PrecomputedKernels local_pk;
    PrecomputedKernels* pk = nullptr;
    if (!on_demand) {
        pk = precomputed != nullptr ? precomputed : &local_pk;
        // overwritten on every call; no previous values are reused
        precompute_all(*ctx.tables, pressure, *pk);
    }

    const PairRegistry& pairs = ctx.tables->pairs();
    const double dt_sub = cfg.dt / cfg.substeps;
    const double w = pressure_weight(pressure);
    std::uint64_t triples = 0;

    for (int step = 0; step < cfg.substeps; ++step) {
        for (int c = 0; c < kNumCategories; ++c) {
            std::memcpy(s->work[c].data(), state.n[c].data(), sizeof(double) * nkr);
            std::memset(s->delta[c].data(), 0, sizeof(double) * nkr);
        }

        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const InteractionPair& pair = pairs[p];
            const double* na = s->work[static_cast<int>(pair.source_a)].data();
            const double* nb = s->work[static_cast<int>(pair.source_b)].data();
            double* da = s->delta[static_cast<int>(pair.source_a)].data();
            double* db = s->delta[static_cast<int>(pair.source_b)].data();
            double* dd = s->delta[static_cast<int>(pair.dest)].data();
            const bool self = pair.is_self();

            // The collecting category holds no particles: every rate in this
            // pair is exactly zero, so the whole table is skipped.
            if (all_zero({na, static_cast<std::size_t>(nkr)}))
                continue;

            for (int i = 0; i < nkr; ++i) {
                const int j0 = self ? i : 0;
                const double nai = na[i];
                const int pi = static_cast<int>(p);
                const double* r750 = on_demand ? ctx.tables->row_750(pi, i) : nullptr;
                const double* r500 = on_demand ? ctx.tables->row_500(pi, i) : nullptr;
                const double* prow = on_demand ? nullptr : pk->row(pi, i);
                for (int j = j0; j < nkr; ++j) {
                    const double kij = on_demand
                                           ? interpolate_kernel(r750[j], r500[j], w)
                                           : prow[j];
                    double rate = kij * nai * nb[j];
                    if (rate == 0.0)
                        continue;
                    const bool diagonal = self && i == j;
                    if (diagonal)
                        rate *= 0.5;
                    const double dn = rate * dt_sub;
                    if (diagonal) {
                        da[i] -= 2.0 * dn;
                    } else {
                        da[i] -= dn;
                        db[j] -= dn;
                    }
                    const GainTable::Entry& e = ctx.gains->at(i, j);
                    if (e.lo >= 0) {
                        dd[e.lo] += dn * e.w_lo;
                        dd[e.lo + 1] += dn * e.w_hi;
                    } else {
                        dd[nkr - 1] += dn * e.top_factor;
                    }
                }
                triples += static_cast<std::uint64_t>(nkr - j0);
            }
        }

        // Jacobi apply + stiffness check. No clamping: a negative bin means
        // the timestep was too large.
        for (int c = 0; c < kNumCategories; ++c) {
            const double* work = s->work[c].data();
            const double* delta = s->delta[c].data();
            double* out = state.n[c].data();
            for (int k = 0; k < nkr; ++k) {
                const double v = work[k] + delta[k];
                if (v < 0.0)
                    throw StiffnessError(
                        "coal_step: bin " + std::to_string(k) + " of category " +
                            category_name(static_cast<Category>(c)) +
                            " would become negative (" + std::to_string(v) +
                            "); reduce dt or increase substeps",
                        c, k);
                out[k] = v;
            }
        }
    }

    // On-demand kernel evaluations are interpolations done in the inner loop
    // above; account for them in one batched add per call.
    if (on_demand)
        ctx.tables->add_evals(triples);
    if (ctx.counters != nullptr) {
        ctx.counters->triples.fetch_add(triples, std::memory_order_relaxed);
        ctx.counters->points.fetch_add(1, std::memory_order_relaxed);
    }
}

} // namespace coalbench
