#pragma once

#include <string>

#include "coalbench/driver.hpp"

namespace coalbench {

/// Binary state snapshot, bit-exact on round-trip.
///
/// Layout (little-endian, IEEE-754 doubles):
///   magic "CBSNAP01", u32 version, u32 nkr,
///   i32 ids, ide, kds, kde, jds, jde, f64 grid ratio,
///   u32 ncat, ncat x (u32 length + name bytes),
///   f64 x[nkr], f64 temperature[npoints], f64 pressure[npoints],
///   ncat x f64 bins[npoints * nkr]  (row-major i,k,j; bin index fastest).
void write_snapshot(const GridState& state, const std::string& path);

/// Throws ConfigError on a malformed or truncated file.
GridState read_snapshot(const std::string& path);

} // namespace coalbench
