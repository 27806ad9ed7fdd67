#pragma once

#include <stdexcept>
#include <string>

namespace lexf {

/// A computation was refused by a feasibility guard (enumeration too large,
/// pair count overflow, objective unbounded, ...).
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

/// The model does not carry enough information for the requested bound or
/// budget (e.g. the cutoff objective is unbounded above).
class insufficient_information : public infeasible_error {
public:
    explicit insufficient_information(const std::string& what) : infeasible_error(what) {}
};

/// An internal numeric procedure failed to converge or produced an
/// inconsistent result.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lexf
