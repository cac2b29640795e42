#include "h2o/membership.hpp"

#include <algorithm>
#include <cmath>

#include "h2o/error.hpp"

namespace h2o {

void fuzzy_row(std::span<const double> d, double tau, std::span<double> out) {
    if (d.size() != out.size()) throw ContractError("fuzzy_row: size mismatch");
    if (!(tau > 1.0)) throw ContractError("fuzzy_row: tau must exceed 1");
    if (d.empty()) return;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (d[j] == 0.0) {
            std::fill(out.begin(), out.end(), 0.0);
            out[j] = 1.0;
            return;
        }
    }
    const double q = 1.0 / (tau - 1.0);
    double top = -INFINITY;
    for (std::size_t j = 0; j < d.size(); ++j) {
        out[j] = -q * std::log(d[j]);
        top = std::max(top, out[j]);
    }
    double sum = 0.0;
    for (auto& v : out) {
        v = std::exp(v - top);
        sum += v;
    }
    for (auto& v : out) v /= sum;
}

} // namespace h2o
