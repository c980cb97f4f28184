#include "macfb/joint_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "macfb/error.hpp"

namespace macfb {

namespace {

std::size_t checked_product(std::span<const Axis> axes) {
  std::size_t n = 1;
  for (const auto& ax : axes) {
    if (ax.card == 0) throw Error(ErrorKind::ShapeMismatch, "axis '" + ax.name + "' has cardinality 0");
    if (n > JointPmf::kMaxEntries / ax.card) {
      throw Error(ErrorKind::SizeGuardExceeded, "joint table would exceed 2^26 entries");
    }
    n *= ax.card;
  }
  if (n > JointPmf::kMaxEntries) throw Error(ErrorKind::SizeGuardExceeded, "joint table would exceed 2^26 entries");
  return n;
}

void check_unique(std::span<const Axis> axes) {
  std::set<std::string_view> seen;
  for (const auto& ax : axes) {
    if (!seen.insert(ax.name).second) throw Error(ErrorKind::DuplicateName, "variable '" + ax.name + "' appears twice");
  }
}

double plogp_sum(std::span<const double> probs) {
  double h = 0.0;
  for (double q : probs) {
    if (q > 0.0) h -= q * std::log2(q);
  }
  return std::max(h, 0.0);
}

std::vector<std::size_t> resolve(const JointPmf& p, const VarSet& names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const auto& n : names) {
    std::size_t i = p.axis_index(n);
    if (std::find(idx.begin(), idx.end(), i) != idx.end()) {
      throw Error(ErrorKind::DuplicateName, "variable '" + n + "' listed twice");
    }
    idx.push_back(i);
  }
  return idx;
}

void check_disjoint(const VarSet& a, const VarSet& b, const VarSet& c) {
  std::set<std::string_view> seen;
  for (const VarSet* s : {&a, &b, &c}) {
    for (const auto& n : *s) {
      if (!seen.insert(n).second) throw Error(ErrorKind::OverlappingSets, "variable '" + n + "' appears in more than one set");
    }
  }
}

}  // namespace

JointPmf::JointPmf() : probs_{1.0} {}

JointPmf::JointPmf(Unchecked, std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {}

JointPmf::JointPmf(std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
  check_unique(axes_);
  std::size_t n = checked_product(axes_);
  if (probs_.size() != n) {
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(n) + " probabilities, got " + std::to_string(probs_.size()));
  }
  long double sum = 0.0L;
  for (double q : probs_) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw Error(ErrorKind::NotNormalized, "negative or non-finite probability");
    sum += q;
  }
  if (std::fabs(static_cast<double>(sum - 1.0L)) > kSumTolerance) {
    throw Error(ErrorKind::NotNormalized, "probabilities sum to " + std::to_string(static_cast<double>(sum)));
  }
}

bool JointPmf::has(std::string_view name) const noexcept {
  return std::any_of(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.name == name; });
}

std::size_t JointPmf::axis_index(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name == name) return i;
  }
  throw Error(ErrorKind::UnknownVariable, "no variable named '" + std::string(name) + "'");
}

double JointPmf::at(std::span<const std::size_t> index) const {
  if (index.size() != axes_.size()) throw Error(ErrorKind::ShapeMismatch, "index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (index[i] >= axes_[i].card) throw Error(ErrorKind::ShapeMismatch, "index out of range");
    flat = flat * axes_[i].card + index[i];
  }
  return probs_[flat];
}

FactorKernel::FactorKernel(std::vector<Axis> outputs, std::vector<std::string> parents, std::vector<double> table)
    : outputs_(std::move(outputs)), parents_(std::move(parents)), table_(std::move(table)) {
  check_unique(outputs_);
  std::set<std::string_view> names;
  for (const auto& o : outputs_) names.insert(o.name);
  for (const auto& p : parents_) {
    if (!names.insert(p).second) throw Error(ErrorKind::DuplicateName, "variable '" + p + "' repeated in kernel");
  }
  std::size_t out = checked_product(outputs_);
  if (table_.empty() || table_.size() % out != 0) {
    throw Error(ErrorKind::ShapeMismatch, "kernel table size is not a multiple of the output alphabet size");
  }
}

std::size_t FactorKernel::output_size() const noexcept {
  std::size_t n = 1;
  for (const auto& o : outputs_) n *= o.card;
  return n;
}

double FactorKernel::normalization_error() const {
  const std::size_t out = output_size();
  double worst = 0.0;
  for (std::size_t base = 0; base < table_.size(); base += out) {
    long double sum = 0.0L;
    for (std::size_t j = 0; j < out; ++j) {
      double q = table_[base + j];
      if (!(q >= 0.0) || !std::isfinite(q)) return std::numeric_limits<double>::infinity();
      sum += q;
    }
    worst = std::max(worst, std::fabs(static_cast<double>(sum - 1.0L)));
  }
  return worst;
}

FactorKernel FactorKernel::renamed(const std::function<std::string(const std::string&)>& rename) const {
  std::vector<Axis> outs = outputs_;
  for (auto& o : outs) o.name = rename(o.name);
  std::vector<std::string> pars;
  pars.reserve(parents_.size());
  for (const auto& p : parents_) pars.push_back(rename(p));
  return FactorKernel(std::move(outs), std::move(pars), table_);
}

JointPmf FactorKernel::apply(const JointPmf& p) const {
  const auto& axes = p.axes();
  std::vector<std::size_t> parent_axes;
  parent_axes.reserve(parents_.size());
  std::size_t configs = 1;
  for (const auto& name : parents_) {
    if (!p.has(name)) throw Error(ErrorKind::UnknownParent, "kernel parent '" + name + "' has not been produced yet");
    std::size_t i = p.axis_index(name);
    parent_axes.push_back(i);
    configs *= axes[i].card;
  }
  for (const auto& o : outputs_) {
    if (p.has(o.name)) throw Error(ErrorKind::DuplicateName, "kernel output '" + o.name + "' already exists");
  }
  if (configs != parent_configs()) {
    throw Error(ErrorKind::ShapeMismatch, "kernel table has " + std::to_string(parent_configs()) +
                                              " parent configurations, parents span " + std::to_string(configs));
  }
  if (normalization_error() > JointPmf::kSumTolerance) {
    throw Error(ErrorKind::NotNormalized, "kernel slice does not sum to 1");
  }

  std::vector<Axis> new_axes = axes;
  new_axes.insert(new_axes.end(), outputs_.begin(), outputs_.end());
  check_unique(new_axes);
  const std::size_t out = output_size();
  const std::size_t total = checked_product(new_axes);

  // Stride of each joint axis inside the parent-configuration index.
  std::vector<std::size_t> parent_stride(axes.size(), 0);
  {
    std::size_t s = 1;
    for (std::size_t k = parent_axes.size(); k-- > 0;) {
      parent_stride[parent_axes[k]] = s;
      s *= axes[parent_axes[k]].card;
    }
  }

  std::vector<double> probs(total, 0.0);
  std::vector<std::size_t> ctr(axes.size(), 0);
  std::size_t cfg = 0;
  const auto src = p.probs();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double q = src[i];
    if (q != 0.0) {
      const double* row = table_.data() + cfg * out;
      double* dst = probs.data() + i * out;
      for (std::size_t j = 0; j < out; ++j) dst[j] = q * row[j];
    }
    for (std::size_t k = axes.size(); k-- > 0;) {
      if (++ctr[k] < axes[k].card) {
        cfg += parent_stride[k];
        break;
      }
      cfg -= parent_stride[k] * (axes[k].card - 1);
      ctr[k] = 0;
    }
  }
  return JointPmf(JointPmf::Unchecked{}, std::move(new_axes), std::move(probs));
}

JointPmf assemble_joint(std::span<const FactorKernel> kernels) {
  JointPmf joint;
  for (const auto& k : kernels) joint = k.apply(joint);
  return joint;
}

JointPmf marginalize_axes(const JointPmf& p, std::span<const std::size_t> keep) {
  const auto& axes = p.axes();
  std::vector<Axis> out_axes;
  out_axes.reserve(keep.size());
  for (std::size_t i : keep) out_axes.push_back(axes.at(i));

  std::vector<std::size_t> out_stride(axes.size(), 0);
  std::size_t out_size = 1;
  for (std::size_t k = keep.size(); k-- > 0;) {
    out_stride[keep[k]] = out_size;
    out_size *= axes[keep[k]].card;
  }

  // Trailing axes that are summed out collapse into one contiguous block.
  std::size_t tail = axes.size();
  std::size_t block = 1;
  while (tail > 0 && out_stride[tail - 1] == 0) {
    --tail;
    block *= axes[tail].card;
  }

  std::vector<double> res(out_size, 0.0);
  std::vector<std::size_t> ctr(tail, 0);
  std::size_t o = 0;
  const auto src = p.probs();
  for (std::size_t i = 0; i < src.size(); i += block) {
    double s = 0.0;
    for (std::size_t j = 0; j < block; ++j) s += src[i + j];
    res[o] += s;
    for (std::size_t k = tail; k-- > 0;) {
      if (++ctr[k] < axes[k].card) {
        o += out_stride[k];
        break;
      }
      o -= out_stride[k] * (axes[k].card - 1);
      ctr[k] = 0;
    }
  }
  return JointPmf(JointPmf::Unchecked{}, std::move(out_axes), std::move(res));
}

JointPmf marginalize(const JointPmf& p, const VarSet& keep) {
  const auto idx = resolve(p, keep);
  return marginalize_axes(p, idx);
}

double entropy(const JointPmf& p, const VarSet& a) {
  return plogp_sum(marginalize(p, a).probs());
}

double cond_mi_discrete(const JointPmf& p, const VarSet& a, const VarSet& b, const VarSet& c) {
  EntropyTable table(p);
  return table.cond_mi(a, b, c);
}

double EntropyTable::entropy_of_axes(std::vector<std::size_t> axes) {
  std::sort(axes.begin(), axes.end());
  if (auto it = cache_.find(axes); it != cache_.end()) return it->second;
  const double h = plogp_sum(marginalize_axes(*p_, axes).probs());
  cache_.emplace(std::move(axes), h);
  return h;
}

double EntropyTable::entropy(const VarSet& a) { return entropy_of_axes(resolve(*p_, a)); }

double EntropyTable::cond_mi(const VarSet& a, const VarSet& b, const VarSet& c) {
  check_disjoint(a, b, c);
  const auto ia = resolve(*p_, a);
  const auto ib = resolve(*p_, b);
  const auto ic = resolve(*p_, c);
  auto join = [](std::initializer_list<const std::vector<std::size_t>*> parts) {
    std::vector<std::size_t> out;
    for (const auto* part : parts) out.insert(out.end(), part->begin(), part->end());
    return out;
  };
  // Summation order is fixed so that swapping a and b is bit-identical.
  const double hac = entropy_of_axes(join({&ia, &ic}));
  const double hbc = entropy_of_axes(join({&ib, &ic}));
  const double hc = entropy_of_axes(ic);
  const double habc = entropy_of_axes(join({&ia, &ib, &ic}));
  const double mi = (std::min(hac, hbc) + std::max(hac, hbc)) - hc - habc;
  return mi < 0.0 ? 0.0 : mi;
}

}  // namespace macfb
