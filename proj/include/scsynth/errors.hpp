#pragma once

#include <stdexcept>
#include <string>

namespace scsynth {

// Malformed external input (files, CLI values).
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally invalid data (broken graph invariants, bad parameters).
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed request that has no solution on the given device.
struct infeasible_error : std::runtime_error {
    explicit infeasible_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace scsynth
