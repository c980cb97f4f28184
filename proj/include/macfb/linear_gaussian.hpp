#pragma once

// Jointly Gaussian variables represented as linear combinations of
// independent zero-mean unit-variance base coordinates. The covariance of
// any set of variables is G*G^T where G stacks their coefficient rows.

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "macfb/joint_pmf.hpp"

namespace macfb {

class LinearGaussianSystem {
 public:
  using Combination = std::vector<std::pair<std::string, double>>;

  std::size_t base_dim() const noexcept { return base_dim_; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  bool has(std::string_view name) const noexcept;

  /// Adds `name` = sum of coefficient * existing row, plus (if the variance
  /// is positive) a fresh independent base coordinate scaled by its root.
  void add(const std::string& name, const Combination& combination, double fresh_noise_variance = 0.0);

  /// Coefficient row of `name`, full base-dimension length.
  Eigen::VectorXd row(std::string_view name) const;
  /// Stacked rows of `names`, one per matrix row.
  Eigen::MatrixXd rows(const VarSet& names) const;

  double covariance(std::string_view a, std::string_view b) const;
  double variance(std::string_view a) const { return covariance(a, a); }
  Eigen::MatrixXd covariance(const VarSet& names) const;

 private:
  std::size_t index_of(std::string_view name) const;

  std::size_t base_dim_ = 0;
  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> index_;
  // Rows are stored at the length the base had when they were created;
  // missing trailing coordinates are zero.
  std::vector<std::vector<double>> rows_;
};

/// Value-returning form of LinearGaussianSystem::add.
LinearGaussianSystem add_variable(LinearGaussianSystem s, const std::string& name,
                                  const LinearGaussianSystem::Combination& combination,
                                  double fresh_noise_variance);

/// Rank tolerance on residual row norms, relative to the largest row norm involved.
inline constexpr double kGaussianRankTolerance = 1e-9;
/// Canonical correlations at or above 1 - this value mean infinite information.
inline constexpr double kCorrelationCeilingGap = 1e-12;

/// I(A;B|C) in bits from the canonical correlations between the residuals of
/// A and B after projecting out span(C). Works for singular covariances.
double cond_mi_gaussian(const LinearGaussianSystem& s, const VarSet& a, const VarSet& b, const VarSet& c);

}  // namespace macfb
