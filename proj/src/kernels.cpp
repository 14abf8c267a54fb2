#include "coalbench/kernels.hpp"

#include <cmath>
#include <unordered_set>

#include "coalbench/errors.hpp"

namespace coalbench {

namespace {

constexpr const char* kCategoryNames[kNumCategories] = {
    "liquid", "ice1", "ice2", "ice3", "snow", "graupel",
};

double family_value(const KernelParams& p, double xi, double xj) {
    switch (p.family) {
    case KernelFamily::constant:
        return p.coeff;
    case KernelFamily::golovin:
        return p.coeff * (xi + xj);
    case KernelFamily::product:
        return p.coeff * xi * xj;
    case KernelFamily::hydrodynamic: {
        // geometric sweep-out proxy: collision cross-section times a
        // smooth, strictly positive velocity-difference scale
        double ri = std::cbrt(xi);
        double rj = std::cbrt(xj);
        double sigma = (ri + rj) * (ri + rj);
        return p.coeff * sigma * std::sqrt(ri * ri + rj * rj);
    }
    }
    throw DomainError("build_tables: unknown kernel family");
}

} // namespace

const char* category_name(Category c) { return kCategoryNames[static_cast<int>(c)]; }

std::optional<Category> category_from_name(std::string_view name) {
    for (int c = 0; c < kNumCategories; ++c)
        if (name == kCategoryNames[c])
            return static_cast<Category>(c);
    return std::nullopt;
}

std::optional<KernelFamily> kernel_family_from_name(std::string_view name) {
    if (name == "constant") return KernelFamily::constant;
    if (name == "golovin") return KernelFamily::golovin;
    if (name == "product") return KernelFamily::product;
    if (name == "hydrodynamic") return KernelFamily::hydrodynamic;
    return std::nullopt;
}

const char* kernel_family_name(KernelFamily f) {
    switch (f) {
    case KernelFamily::constant: return "constant";
    case KernelFamily::golovin: return "golovin";
    case KernelFamily::product: return "product";
    case KernelFamily::hydrodynamic: return "hydrodynamic";
    }
    return "unknown";
}

PairRegistry default_pair_registry() {
    using C = Category;
    return {
        // self-pairs
        {"cwll", C::liquid, C::liquid, C::liquid},
        {"cwi1i1", C::ice1, C::ice1, C::ice1},
        {"cwi2i2", C::ice2, C::ice2, C::ice2},
        {"cwi3i3", C::ice3, C::ice3, C::ice3},
        {"cwss", C::snow, C::snow, C::snow},
        {"cwgg", C::graupel, C::graupel, C::graupel},
        // liquid collected by frozen categories
        {"cwli1", C::liquid, C::ice1, C::ice1},
        {"cwli2", C::liquid, C::ice2, C::ice2},
        {"cwli3", C::liquid, C::ice3, C::ice3},
        {"cwls", C::liquid, C::snow, C::snow},
        {"cwlg", C::liquid, C::graupel, C::graupel},
        // ice collected by snow and graupel
        {"cwi1s", C::ice1, C::snow, C::snow},
        {"cwi2s", C::ice2, C::snow, C::snow},
        {"cwi3s", C::ice3, C::snow, C::snow},
        {"cwi1g", C::ice1, C::graupel, C::graupel},
        {"cwi2g", C::ice2, C::graupel, C::graupel},
        {"cwi3g", C::ice3, C::graupel, C::graupel},
        {"cwsg", C::snow, C::graupel, C::graupel},
        // directional riming pairs
        {"cwsl", C::snow, C::liquid, C::graupel},
        {"cwgl", C::graupel, C::liquid, C::graupel},
    };
}

void validate_registry(const PairRegistry& pairs, bool allow_nonstandard_count) {
    if (pairs.empty())
        throw ConfigError("pair registry is empty");
    std::unordered_set<std::string> ids;
    for (const auto& p : pairs) {
        if (p.id.empty())
            throw ConfigError("pair registry entry has an empty id");
        if (!ids.insert(p.id).second)
            throw ConfigError("duplicate pair id '" + p.id + "' in registry");
    }
    if (!allow_nonstandard_count && static_cast<int>(pairs.size()) != kStandardPairCount)
        throw ConfigError("pair registry has " + std::to_string(pairs.size()) + " entries; " +
                          std::to_string(kStandardPairCount) +
                          " required unless explicitly overridden");
}

KernelTableSet::KernelTableSet(int nkr, PairRegistry pairs)
    : nkr_(nkr), pairs_(std::move(pairs)),
      t750_(static_cast<std::size_t>(nkr) * nkr * pairs_.size(), 0.0),
      t500_(static_cast<std::size_t>(nkr) * nkr * pairs_.size(), 0.0),
      evals_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

KernelTableSet build_tables(const MassGrid& grid, const PairRegistry& pairs,
                            const KernelParams& params) {
    if (!(params.coeff >= 0.0) || !std::isfinite(params.coeff))
        throw DomainError("build_tables: kernel coefficient must be finite and >= 0");
    if (!(params.level_scale >= 0.0) || !std::isfinite(params.level_scale))
        throw DomainError("build_tables: level_scale must be finite and >= 0");
    if (!(params.pair_scale_step >= 0.0) || !std::isfinite(params.pair_scale_step))
        throw DomainError("build_tables: pair_scale_step must be finite and >= 0");
    validate_registry(pairs, /*allow_nonstandard_count=*/true);

    const int nkr = grid.nkr();
    KernelTableSet tables(nkr, pairs);
    for (int p = 0; p < tables.num_pairs(); ++p) {
        const double pair_scale = 1.0 + params.pair_scale_step * p;
        for (int i = 0; i < nkr; ++i) {
            for (int j = 0; j < nkr; ++j) {
                double v = family_value(params, grid.x[i], grid.x[j]) * pair_scale;
                tables.mutable_750(p, i, j) = v;
                tables.mutable_500(p, i, j) = v * params.level_scale;
            }
        }
    }
    return tables;
}

double kernel_at(const KernelTableSet& tables, int pair, int i, int j, double pressure) {
    if (pair < 0 || pair >= tables.num_pairs())
        throw DomainError("kernel_at: pair index " + std::to_string(pair) + " out of range");
    if (i < 0 || i >= tables.nkr() || j < 0 || j >= tables.nkr())
        throw DomainError("kernel_at: bin index (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") out of range for nkr=" +
                          std::to_string(tables.nkr()));
    tables.add_evals(1);
    const double w = pressure_weight(pressure);
    return interpolate_kernel(tables.value_750(pair, i, j), tables.value_500(pair, i, j), w);
}

void precompute_all(const KernelTableSet& tables, double pressure, PrecomputedKernels& out) {
    const int nkr = tables.nkr();
    const int npairs = tables.num_pairs();
    out.nkr = nkr;
    out.num_pairs = npairs;
    out.values.resize(static_cast<std::size_t>(npairs) * nkr * nkr);

    const double w = pressure_weight(pressure);
    std::size_t idx = 0;
    for (int p = 0; p < npairs; ++p) {
        for (int i = 0; i < nkr; ++i) {
            const double* r750 = tables.row_750(p, i);
            const double* r500 = tables.row_500(p, i);
            for (int j = 0; j < nkr; ++j)
                out.values[idx++] = interpolate_kernel(r750[j], r500[j], w);
        }
    }
    tables.add_evals(static_cast<std::uint64_t>(npairs) * nkr * nkr);
}

PrecomputedKernels precompute_all(const KernelTableSet& tables, double pressure) {
    PrecomputedKernels out;
    precompute_all(tables, pressure, out);
    return out;
}

} // namespace coalbench
