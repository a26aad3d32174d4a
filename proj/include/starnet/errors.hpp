#pragma once

#include <stdexcept>
#include <string>

namespace starnet {

// Index or parameter outside its admissible range.
class range_error : public std::out_of_range {
public:
    explicit range_error(const std::string& what) : std::out_of_range(what) {}
};

// Coupling configuration with theta_N = 0 (or a zero partial theta where it is divided by).
class degenerate_coupling_error : public std::invalid_argument {
public:
    explicit degenerate_coupling_error(const std::string& what) : std::invalid_argument(what) {}
};

// A state or matrix that violates a physical invariant beyond tolerance.
class invalid_state_error : public std::invalid_argument {
public:
    explicit invalid_state_error(const std::string& what) : std::invalid_argument(what) {}
};

// Truncated Fock space would exceed the dimension guard.
class capacity_error : public std::length_error {
public:
    explicit capacity_error(const std::string& what) : std::length_error(what) {}
};

class dimension_error : public std::invalid_argument {
public:
    explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace starnet
