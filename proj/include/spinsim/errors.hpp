#pragma once

#include <stdexcept>
#include <string>

namespace spinsim {

// Malformed or inconsistent configuration / profile data.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An operation violated an array or controller contract (preset not done,
// two steps in flight, address out of range, ...).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// A workload does not fit the configured geometry.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Assembly text that could not be parsed.
struct AsmError : std::runtime_error {
    AsmError(const std::string& msg, int line, int column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line(line), column(column) {}
    int line;
    int column;
};

}  // namespace spinsim
