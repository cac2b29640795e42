#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace h2o {

enum class MembershipKind { LsfcmMu, InterferenceU };

// Row-major N x c matrix of fuzzy memberships; each row is a distribution.
class MembershipMatrix {
public:
    MembershipMatrix() = default;
    MembershipMatrix(std::size_t rows, std::size_t cols, MembershipKind kind)
        : rows_(rows), cols_(cols), kind_(kind), values_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    MembershipKind kind() const { return kind_; }

    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    MembershipKind kind_ = MembershipKind::LsfcmMu;
    std::vector<double> values_;
};

// Fuzzy c-means membership row from dissimilarities that already scale like a
// squared distance: u_j = 1 / sum_k (d_j / d_k)^(1/(tau-1)). A zero entry
// takes the whole membership (first zero wins). Evaluated in log space.
void fuzzy_row(std::span<const double> dissimilarity, double tau, std::span<double> out);

} // namespace h2o
