#include "coalbench/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>

#include "coalbench/errors.hpp"

namespace coalbench {

int digit_agreement(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw DomainError("digit_agreement: inputs must be finite");
    if (a == b)
        return 16;
    if (a + b == 0.0)
        return 0;
    const double rel = 2.0 * std::fabs(a - b) / (std::fabs(a) + std::fabs(b));
    const double digits = std::floor(-std::log10(rel));
    if (digits < 0.0)
        return 0;
    if (digits > 16.0)
        return 16;
    return static_cast<int>(digits);
}

bool DiffReport::all_exact() const {
    for (const auto& f : fields)
        if (f.count_exact != f.count_compared)
            return false;
    return true;
}

int DiffReport::min_digits() const {
    int m = 16;
    for (const auto& f : fields)
        m = std::min(m, f.min_digits);
    return m;
}

namespace {

FieldDiff diff_field(const std::string& name, std::span<const double> a,
                     std::span<const double> b) {
    FieldDiff d;
    d.field = name;
    d.count_compared = a.size();
    if (a.empty())
        return d;
    std::uint64_t digit_sum = 0;
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
        const int digits = digit_agreement(a[idx], b[idx]);
        d.min_digits = std::min(d.min_digits, digits);
        digit_sum += static_cast<std::uint64_t>(digits);
        if (digits == 16)
            ++d.count_exact;
    }
    d.mean_digits = static_cast<double>(digit_sum) / static_cast<double>(a.size());
    return d;
}

} // namespace

DiffReport compare_states(const GridState& a, const GridState& b) {
    if (!(a.ranges == b.ranges))
        throw ShapeError("compare_states: domain ranges differ");
    if (a.nkr() != b.nkr())
        throw ShapeError("compare_states: nkr differs (" + std::to_string(a.nkr()) + " vs " +
                         std::to_string(b.nkr()) + ")");

    DiffReport report;
    report.fields.push_back(diff_field("mass_grid", a.grid.x, b.grid.x));
    report.fields.push_back(diff_field("temperature", a.temperature, b.temperature));
    report.fields.push_back(diff_field("pressure", a.pressure, b.pressure));
    for (int c = 0; c < kNumCategories; ++c)
        report.fields.push_back(
            diff_field(category_name(static_cast<Category>(c)), a.bins[c], b.bins[c]));
    return report;
}

std::string format_diff_report(const DiffReport& report) {
    std::string out;
    out += "field          min_digits  mean_digits     compared        exact\n";
    char line[128];
    for (const auto& f : report.fields) {
        std::snprintf(line, sizeof(line), "%-14s %10d %12.2f %12llu %12llu\n", f.field.c_str(),
                      f.min_digits, f.mean_digits,
                      static_cast<unsigned long long>(f.count_compared),
                      static_cast<unsigned long long>(f.count_exact));
        out += line;
    }
    return out;
}

} // namespace coalbench
