#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coalbench/mass_grid.hpp"

namespace coalbench {

/// Hydrometeor categories. The bin grid is shared; each category carries its
/// own distributions.
enum class Category : int {
    liquid = 0,
    ice1,
    ice2,
    ice3,
    snow,
    graupel,
};

inline constexpr int kNumCategories = 6;

const char* category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);

/// One named ordered collision pair: collisions between bins of source_a and
/// source_b deposit the coalesced mass into dest.
struct InteractionPair {
    std::string id;
    Category source_a;
    Category source_b;
    Category dest;

    bool is_self() const { return source_a == source_b; }
};

using PairRegistry = std::vector<InteractionPair>;

/// Expected registry size unless a config explicitly overrides it.
inline constexpr int kStandardPairCount = 20;

/// The canonical 20-pair registry: six self-pairs, the twelve cross-category
/// pairs without ice-ice crosses, and two directional riming pairs
/// (snow+liquid and graupel+liquid, both into graupel).
PairRegistry default_pair_registry();

/// Checks ids are unique and the count is kStandardPairCount unless
/// allow_nonstandard_count. Throws ConfigError.
void validate_registry(const PairRegistry& pairs, bool allow_nonstandard_count = false);

enum class KernelFamily {
    constant,      ///< K = coeff
    golovin,       ///< K = coeff * (x_i + x_j)
    product,       ///< K = coeff * x_i * x_j
    hydrodynamic,  ///< K = coeff * (x_i^(1/3) + x_j^(1/3))^2 * (x_i^(2/3) + x_j^(2/3))^(1/2)
};

std::optional<KernelFamily> kernel_family_from_name(std::string_view name);
const char* kernel_family_name(KernelFamily f);

struct KernelParams {
    KernelFamily family = KernelFamily::golovin;
    double coeff = 1.0;
    /// The 500 mb table is the 750 mb table scaled by this factor, so the
    /// pressure interpolation is observable.
    double level_scale = 1.5;
    /// Optional per-pair distinction: pair p is scaled by 1 + p*pair_scale_step.
    /// Zero keeps all pairs identical.
    double pair_scale_step = 0.0;
};

/// Per-pair nkr x nkr kernel values at the two reference pressure levels,
/// plus the shared evaluation counter. Immutable after build; safe for
/// concurrent reads. The counter is monotonic with relaxed ordering (exact
/// totals are read only after quiescence).
class KernelTableSet {
public:
    static constexpr double kLowPressure = 500.0;  ///< hPa
    static constexpr double kHighPressure = 750.0; ///< hPa

    KernelTableSet(int nkr, PairRegistry pairs);

    int nkr() const { return nkr_; }
    int num_pairs() const { return static_cast<int>(pairs_.size()); }
    const PairRegistry& pairs() const { return pairs_; }

    double value_750(int pair, int i, int j) const { return t750_[index(pair, i, j)]; }
    double value_500(int pair, int i, int j) const { return t500_[index(pair, i, j)]; }

    const double* row_750(int pair, int i) const { return &t750_[index(pair, i, 0)]; }
    const double* row_500(int pair, int i) const { return &t500_[index(pair, i, 0)]; }

    double& mutable_750(int pair, int i, int j) { return t750_[index(pair, i, j)]; }
    double& mutable_500(int pair, int i, int j) { return t500_[index(pair, i, j)]; }

    std::uint64_t eval_count() const { return evals_->load(std::memory_order_relaxed); }
    void add_evals(std::uint64_t n) const { evals_->fetch_add(n, std::memory_order_relaxed); }

private:
    std::size_t index(int pair, int i, int j) const {
        return (static_cast<std::size_t>(pair) * nkr_ + i) * nkr_ + j;
    }

    int nkr_;
    PairRegistry pairs_;
    std::vector<double> t750_, t500_;
    // shared so that copies of the table set keep one counter
    std::shared_ptr<std::atomic<std::uint64_t>> evals_;
};

/// Fills both pressure-level tables for every registered pair from the
/// family formula. Throws DomainError on negative or non-finite params.
KernelTableSet build_tables(const MassGrid& grid, const PairRegistry& pairs,
                            const KernelParams& params);

/// Linear interpolation weight for a pressure, clamped to [0, 1] outside the
/// 500..750 hPa reference band.
inline double pressure_weight(double pressure) {
    double w = (pressure - KernelTableSet::kLowPressure) /
               (KernelTableSet::kHighPressure - KernelTableSet::kLowPressure);
    if (w < 0.0) w = 0.0;
    if (w > 1.0) w = 1.0;
    return w;
}

/// Normative evaluation order: K500 + (K750 - K500) * w. Every kernel access
/// path must produce these exact bits.
inline double interpolate_kernel(double k750, double k500, double w) {
    return k500 + (k750 - k500) * w;
}

/// On-demand accessor: one kernel value, no table fill. Adds 1 to the
/// evaluation counter. Indices are 0-based; throws DomainError out of range.
double kernel_at(const KernelTableSet& tables, int pair, int i, int j, double pressure);

/// All pairs interpolated to one pressure. Every entry is bitwise equal to
/// the kernel_at result for the same (pair, i, j, pressure).
struct PrecomputedKernels {
    int nkr = 0;
    int num_pairs = 0;
    std::vector<double> values; ///< [pair][i][j]

    double at(int pair, int i, int j) const {
        return values[(static_cast<std::size_t>(pair) * nkr + i) * nkr + j];
    }
    const double* row(int pair, int i) const {
        return &values[(static_cast<std::size_t>(pair) * nkr + i) * nkr];
    }
};

/// Fills `out` (resizing if needed) with all num_pairs * nkr^2 interpolated
/// values and adds that amount to the evaluation counter.
void precompute_all(const KernelTableSet& tables, double pressure, PrecomputedKernels& out);

PrecomputedKernels precompute_all(const KernelTableSet& tables, double pressure);

} // namespace coalbench
