#pragma once

#include <stdexcept>
#include <string>

namespace simjudge {

// Malformed or inconsistent input data. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computation that cannot produce a finite answer (singular system,
// zero variance, degenerate dissimilarities). The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace simjudge
