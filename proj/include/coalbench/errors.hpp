#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coalbench {

/// Base class for all coalbench errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument value was violated.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Containers that must agree on extents (nkr, grid ranges, categories) do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Inconsistent run configuration or unparsable config file.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A bin density would become negative within one substep: the timestep is
/// too large for the explicit update. Never clamped silently.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& msg, int category, int bin)
        : Error(msg), category_(category), bin_(bin) {}

    StiffnessError(const std::string& msg, int category, int bin, int i, int k, int j)
        : Error(msg), category_(category), bin_(bin), has_point_(true), i_(i), k_(k), j_(j) {}

    int category() const { return category_; }
    int bin() const { return bin_; }
    bool has_point() const { return has_point_; }
    int i() const { return i_; }
    int k() const { return k_; }
    int j() const { return j_; }

    /// Rebuilds the error with grid-point coordinates attached.
    StiffnessError at_point(int i, int k, int j) const {
        return StiffnessError(std::string(what()) + " at grid point (i=" + std::to_string(i) +
                                  ", k=" + std::to_string(k) + ", j=" + std::to_string(j) + ")",
                              category_, bin_, i, k, j);
    }

private:
    int category_ = -1;
    int bin_ = -1;
    bool has_point_ = false;
    int i_ = 0, k_ = 0, j_ = 0;
};

/// Scratch arena could not be allocated; carries the requested size.
class AllocationError : public Error {
public:
    AllocationError(const std::string& msg, std::size_t required_bytes)
        : Error(msg), required_bytes_(required_bytes) {}

    std::size_t required_bytes() const { return required_bytes_; }

private:
    std::size_t required_bytes_;
};

} // namespace coalbench
