#pragma once

#include <stdexcept>
#include <string>

namespace cqbm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Probability found where the circuit must never put it: on an excluded
// measurement outcome or inside an obstacle.
class LeakageError : public Error {
public:
    using Error::Error;
};

// An ancilla that should be back in |0> at a timestep boundary is not.
class AncillaError : public Error {
public:
    using Error::Error;
};

}  // namespace cqbm
