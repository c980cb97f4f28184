#include "macfb/linear_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "macfb/error.hpp"

namespace macfb {

namespace {

// Orthonormal basis (as rows) of the row space of m, dropping directions
// whose singular value is at or below tol.
Eigen::MatrixXd orthonormal_rows(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() == 0) return Eigen::MatrixXd(0, m.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  return svd.matrixV().leftCols(rank).transpose();
}

Eigen::MatrixXd project_out(Eigen::MatrixXd m, const Eigen::MatrixXd& basis) {
  if (basis.rows() == 0 || m.rows() == 0) return m;
  // Two passes of classical Gram-Schmidt keep the residual orthogonal to
  // working precision.
  for (int pass = 0; pass < 2; ++pass) m -= (m * basis.transpose()) * basis;
  return m;
}

}  // namespace

bool LinearGaussianSystem::has(std::string_view name) const noexcept { return index_.find(name) != index_.end(); }

std::size_t LinearGaussianSystem::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorKind::UnknownVariable, "no Gaussian variable named '" + std::string(name) + "'");
  return it->second;
}

void LinearGaussianSystem::add(const std::string& name, const Combination& combination, double fresh_noise_variance) {
  if (has(name)) throw Error(ErrorKind::DuplicateName, "Gaussian variable '" + name + "' already exists");
  if (!(fresh_noise_variance >= 0.0) || !std::isfinite(fresh_noise_variance)) {
    throw Error(ErrorKind::InvalidParams, "fresh noise variance must be finite and nonnegative");
  }
  std::vector<double> r(base_dim_, 0.0);
  for (const auto& [src, coef] : combination) {
    const auto& sr = rows_[index_of(src)];
    for (std::size_t k = 0; k < sr.size(); ++k) r[k] += coef * sr[k];
  }
  if (fresh_noise_variance > 0.0) {
    ++base_dim_;
    r.push_back(std::sqrt(fresh_noise_variance));
  }
  index_.emplace(name, names_.size());
  names_.push_back(name);
  rows_.push_back(std::move(r));
}

Eigen::VectorXd LinearGaussianSystem::row(std::string_view name) const {
  const auto& r = rows_[index_of(name)];
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(base_dim_));
  for (std::size_t k = 0; k < r.size(); ++k) v(static_cast<Eigen::Index>(k)) = r[k];
  return v;
}

Eigen::MatrixXd LinearGaussianSystem::rows(const VarSet& names) const {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(names.size()), static_cast<Eigen::Index>(base_dim_));
  for (std::size_t i = 0; i < names.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = row(names[i]).transpose();
  return g;
}

double LinearGaussianSystem::covariance(std::string_view a, std::string_view b) const {
  const auto& ra = rows_[index_of(a)];
  const auto& rb = rows_[index_of(b)];
  double s = 0.0;
  for (std::size_t k = 0; k < std::min(ra.size(), rb.size()); ++k) s += ra[k] * rb[k];
  return s;
}

Eigen::MatrixXd LinearGaussianSystem::covariance(const VarSet& names) const {
  const Eigen::MatrixXd g = rows(names);
  return g * g.transpose();
}

LinearGaussianSystem add_variable(LinearGaussianSystem s, const std::string& name,
                                  const LinearGaussianSystem::Combination& combination,
                                  double fresh_noise_variance) {
  s.add(name, combination, fresh_noise_variance);
  return s;
}

double cond_mi_gaussian(const LinearGaussianSystem& s, const VarSet& a, const VarSet& b, const VarSet& c) {
  {
    std::set<std::string_view> seen;
    for (const VarSet* set : {&a, &b, &c}) {
      for (const auto& n : *set) {
        if (!s.has(n)) throw Error(ErrorKind::UnknownVariable, "no Gaussian variable named '" + n + "'");
        if (!seen.insert(n).second) throw Error(ErrorKind::OverlappingSets, "variable '" + n + "' appears in more than one set");
      }
    }
  }
  if (a.empty() || b.empty()) return 0.0;

  const Eigen::MatrixXd ga = s.rows(a);
  const Eigen::MatrixXd gb = s.rows(b);
  const Eigen::MatrixXd gc = s.rows(c);

  double scale = std::max(ga.rowwise().norm().maxCoeff(), gb.rowwise().norm().maxCoeff());
  if (gc.rows() > 0) scale = std::max(scale, gc.rowwise().norm().maxCoeff());
  if (scale == 0.0) return 0.0;
  const double tol = kGaussianRankTolerance * scale;

  const Eigen::MatrixXd qc = orthonormal_rows(gc, tol);
  const Eigen::MatrixXd qa = orthonormal_rows(project_out(ga, qc), tol);
  const Eigen::MatrixXd qb = orthonormal_rows(project_out(gb, qc), tol);
  if (qa.rows() == 0 || qb.rows() == 0) return 0.0;

  const Eigen::VectorXd rho = (qa * qb.transpose()).jacobiSvd().singularValues();
  double nats = 0.0;
  for (Eigen::Index k = 0; k < rho.size(); ++k) {
    const double r = rho(k);
    if (r >= 1.0 - kCorrelationCeilingGap) {
      throw Error(ErrorKind::InfiniteMutualInformation, "residual subspaces share a direction (canonical correlation " +
                                                            std::to_string(r) + ")");
    }
    nats -= 0.5 * std::log1p(-r * r);
  }
  return std::max(nats / std::numbers::ln2, 0.0);
}

}  // namespace macfb
