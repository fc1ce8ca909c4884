#pragma once

#include <span>

namespace simjudge {

// Pearson correlation. Throws InputError for mismatched lengths or fewer
// than 3 values, NumericError when either side has zero variance.
double pearson_r(std::span<const double> pred, std::span<const double> truth);

// Squared Pearson correlation ("variance explained"), in [0, 1].
double pearson_r2(std::span<const double> pred, std::span<const double> truth);

}  // namespace simjudge
