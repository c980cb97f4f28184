#pragma once

// Dense joint probability tables over named finite-alphabet variables, the
// chain-rule assembly of such tables from conditional kernels, and the
// entropy / conditional mutual information queries built on top of them.
// All information quantities are in bits.

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace macfb {

/// Ordered set of variable names.
using VarSet = std::vector<std::string>;

struct Axis {
  std::string name;
  std::size_t card = 1;

  bool operator==(const Axis&) const = default;
};

/// Joint pmf stored row-major in axis order (last axis fastest).
class JointPmf {
 public:
  static constexpr std::size_t kMaxEntries = std::size_t{1} << 26;
  static constexpr double kSumTolerance = 1e-12;

  /// The trivial distribution over zero variables.
  JointPmf();

  /// Validates nonnegativity, normalization, unique names and the size guard.
  JointPmf(std::vector<Axis> axes, std::vector<double> probs);

  const std::vector<Axis>& axes() const noexcept { return axes_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }

  bool has(std::string_view name) const noexcept;
  /// Position of `name` among the axes; throws UnknownVariable.
  std::size_t axis_index(std::string_view name) const;

  /// Probability of one cell, indices in axis order.
  double at(std::span<const std::size_t> index) const;

 private:
  struct Unchecked {};
  JointPmf(Unchecked, std::vector<Axis> axes, std::vector<double> probs);

  friend class FactorKernel;
  friend JointPmf marginalize(const JointPmf&, const VarSet&);
  friend JointPmf marginalize_axes(const JointPmf&, std::span<const std::size_t>);

  std::vector<Axis> axes_;
  std::vector<double> probs_;
};

/// Conditional distribution of `outputs` given `parents`. The table is
/// parent-major, output-minor: one distribution over the output cells per
/// parent configuration, parent configurations enumerated row-major in
/// parent order.
class FactorKernel {
 public:
  FactorKernel(std::vector<Axis> outputs, std::vector<std::string> parents,
               std::vector<double> table);

  const std::vector<Axis>& outputs() const noexcept { return outputs_; }
  const std::vector<std::string>& parents() const noexcept { return parents_; }
  std::span<const double> table() const noexcept { return table_; }

  std::size_t output_size() const noexcept;
  std::size_t parent_configs() const noexcept { return table_.size() / output_size(); }

  /// Largest |sum - 1| over all conditional slices, or +inf if an entry is negative.
  double normalization_error() const;

  /// Same kernel with every output and parent name passed through `rename`.
  FactorKernel renamed(const std::function<std::string(const std::string&)>& rename) const;

  /// Joint of `p` extended by this kernel's outputs (appended as new axes).
  JointPmf apply(const JointPmf& p) const;

 private:
  std::vector<Axis> outputs_;
  std::vector<std::string> parents_;
  std::vector<double> table_;
};

/// Chain-rule product of kernels given in topological order.
JointPmf assemble_joint(std::span<const FactorKernel> kernels);

/// Sums out every axis not in `keep`; the result's axes follow `keep`'s order.
JointPmf marginalize(const JointPmf& p, const VarSet& keep);
JointPmf marginalize_axes(const JointPmf& p, std::span<const std::size_t> keep);

double entropy(const JointPmf& p, const VarSet& a);

/// I(A;B|C) in bits, clamped at zero for tiny negative rounding noise.
double cond_mi_discrete(const JointPmf& p, const VarSet& a, const VarSet& b, const VarSet& c);

/// Memoizing evaluator for many entropy queries against one large joint.
class EntropyTable {
 public:
  explicit EntropyTable(const JointPmf& p) : p_(&p) {}

  double entropy(const VarSet& a);
  double cond_mi(const VarSet& a, const VarSet& b, const VarSet& c);

 private:
  double entropy_of_axes(std::vector<std::size_t> axes);

  const JointPmf* p_;
  std::map<std::vector<std::size_t>, double> cache_;
};

}  // namespace macfb
