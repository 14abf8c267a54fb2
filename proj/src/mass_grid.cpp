#include "coalbench/mass_grid.hpp"

#include <cmath>
#include <string>

#include "coalbench/errors.hpp"

namespace coalbench {

MassGrid make_mass_grid(int nkr, double x1, double ratio) {
    if (nkr < 2)
        throw DomainError("make_mass_grid: nkr must be >= 2, got " + std::to_string(nkr));
    if (!(x1 > 0.0) || !std::isfinite(x1))
        throw DomainError("make_mass_grid: x1 must be positive and finite");
    if (!(ratio > 1.0) || !std::isfinite(ratio))
        throw DomainError("make_mass_grid: ratio must be > 1");

    MassGrid grid;
    grid.ratio = ratio;
    grid.x.resize(nkr);
    grid.x[0] = x1;
    for (int k = 1; k < nkr; ++k)
        grid.x[k] = grid.x[k - 1] * ratio;
    return grid;
}

BinDistribution exponential_init(const MassGrid& grid, double n_total, double xbar) {
    if (!(n_total >= 0.0) || !std::isfinite(n_total))
        throw DomainError("exponential_init: n_total must be >= 0");
    if (!(xbar > 0.0) || !std::isfinite(xbar))
        throw DomainError("exponential_init: xbar must be > 0");

    BinDistribution dist;
    dist.n.assign(grid.x.size(), 0.0);
    if (n_total == 0.0)
        return dist;

    double wsum = 0.0;
    for (int k = 0; k < grid.nkr(); ++k) {
        dist.n[k] = grid.x[k] * std::exp(-grid.x[k] / xbar);
        wsum += dist.n[k];
    }
    if (wsum == 0.0)
        throw DomainError("exponential_init: all weights underflowed to zero");
    for (double& v : dist.n)
        v = n_total * (v / wsum);
    return dist;
}

double total_mass(const BinDistribution& dist, const MassGrid& grid) {
    if (dist.nkr() != grid.nkr())
        throw ShapeError("total_mass: distribution has " + std::to_string(dist.nkr()) +
                         " bins, grid has " + std::to_string(grid.nkr()));
    double sum = 0.0;
    for (int k = 0; k < dist.nkr(); ++k)
        sum += dist.n[k] * grid.x[k];
    return sum;
}

double total_number(const BinDistribution& dist) {
    double sum = 0.0;
    for (double v : dist.n)
        sum += v;
    return sum;
}

} // namespace coalbench
