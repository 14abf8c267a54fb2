#pragma once

#include <vector>

namespace coalbench {

/// Geometric mass-doubling bin grid shared by all hydrometeor categories.
/// x[k+1] = ratio * x[k] by construction.
struct MassGrid {
    std::vector<double> x; ///< bin masses [kg], strictly increasing
    double ratio = 2.0;    ///< mass ratio between adjacent bins

    int nkr() const { return static_cast<int>(x.size()); }
};

/// Number densities per bin [m^-3] for one category at one grid point.
/// Entries are kept nonnegative; a negative update result is a stiffness
/// error, never a clamp.
struct BinDistribution {
    std::vector<double> n;

    int nkr() const { return static_cast<int>(n.size()); }
};

/// Builds the grid x[k] = x1 * ratio^k (k = 0..nkr-1) by repeated
/// multiplication. Requires nkr >= 2, x1 > 0, ratio > 1.
MassGrid make_mass_grid(int nkr, double x1, double ratio);

/// Distribution with weights w[k] proportional to x[k]*exp(-x[k]/xbar),
/// normalized discretely so that the bin sum equals n_total exactly.
BinDistribution exponential_init(const MassGrid& grid, double n_total, double xbar);

/// Mass density sum(n[k] * x[k]) [kg m^-3].
double total_mass(const BinDistribution& dist, const MassGrid& grid);

/// Number density sum(n[k]) [m^-3].
double total_number(const BinDistribution& dist);

} // namespace coalbench
