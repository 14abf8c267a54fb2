#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coalbench/driver.hpp"

namespace coalbench {

/// Decimal significant digits of agreement between two finite values, via
/// symmetric relative error:
///   equal values (including +0/-0)     -> 16
///   a + b == 0 with a != b             -> 0
///   otherwise clamp(floor(-log10(2|a-b| / (|a|+|b|))), 0, 16).
/// Throws DomainError on non-finite input.
int digit_agreement(double a, double b);

struct FieldDiff {
    std::string field;
    int min_digits = 16;
    double mean_digits = 16.0;
    std::uint64_t count_compared = 0;
    std::uint64_t count_exact = 0;
};

struct DiffReport {
    std::vector<FieldDiff> fields;

    bool all_exact() const;
    int min_digits() const;
};

/// Per-field digit agreement over two snapshots of identical shape
/// (extents, nkr, categories). Fields are the mass grid, temperature,
/// pressure and each category's bins. Throws ShapeError on mismatch.
DiffReport compare_states(const GridState& a, const GridState& b);

/// Aligned text table, one row per field.
std::string format_diff_report(const DiffReport& report);

} // namespace coalbench
