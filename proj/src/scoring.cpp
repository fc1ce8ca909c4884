#include "simjudge/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "simjudge/errors.hpp"

namespace simjudge {

double pearson_r(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) throw InputError("pearson: lengths differ");
    if (pred.size() < 3) throw InputError("pearson: need at least 3 values");
    const auto n = static_cast<double>(pred.size());
    double mp = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        mp += pred[i];
        mt += truth[i];
    }
    mp /= n;
    mt /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double dp = pred[i] - mp, dt = truth[i] - mt;
        sxy += dp * dt;
        sxx += dp * dp;
        syy += dt * dt;
    }
    if (sxx == 0.0 || syy == 0.0) throw NumericError("pearson: zero variance");
    return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

double pearson_r2(std::span<const double> pred, std::span<const double> truth) {
    const double r = pearson_r(pred, truth);
    return r * r;
}

}  // namespace simjudge
