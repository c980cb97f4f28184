#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "macfb/error.hpp"
#include "macfb/joint_pmf.hpp"
#include "macfb/linear_gaussian.hpp"

using namespace macfb;

namespace {

FactorKernel bern(const std::string& name, double p1) { return FactorKernel({{name, 2}}, {}, {1.0 - p1, p1}); }

double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

// Entropy by direct enumeration, grouping cells by the projected index.
double brute_entropy(const JointPmf& p, const VarSet& vars) {
  std::vector<std::size_t> ax;
  for (const auto& v : vars) ax.push_back(p.axis_index(v));
  std::map<std::vector<std::size_t>, double> acc;
  const auto& axes = p.axes();
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t cell = 0; cell < p.size(); ++cell) {
    std::size_t rem = cell;
    for (std::size_t i = axes.size(); i-- > 0;) {
      idx[i] = rem % axes[i].card;
      rem /= axes[i].card;
    }
    std::vector<std::size_t> key;
    for (auto a : ax) key.push_back(idx[a]);
    acc[key] += p.probs()[cell];
  }
  double h = 0;
  for (const auto& [k, q] : acc)
    if (q > 0) h -= q * std::log2(q);
  return h;
}

double brute_cmi(const JointPmf& p, VarSet a, VarSet b, const VarSet& c) {
  VarSet ac = a, bc = b, abc = a;
  ac.insert(ac.end(), c.begin(), c.end());
  bc.insert(bc.end(), c.begin(), c.end());
  abc.insert(abc.end(), b.begin(), b.end());
  abc.insert(abc.end(), c.begin(), c.end());
  return brute_entropy(p, ac) + brute_entropy(p, bc) - brute_entropy(p, abc) - brute_entropy(p, c);
}

FactorKernel random_table(std::mt19937_64& rng, std::vector<Axis> outs, std::vector<std::string> parents,
                          std::size_t configs) {
  std::size_t n = 1;
  for (const auto& o : outs) n *= o.card;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> t(n * configs);
  for (std::size_t c = 0; c < configs; ++c) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += t[c * n + i] = u(rng);
    for (std::size_t i = 0; i < n; ++i) t[c * n + i] /= s;
  }
  return FactorKernel(std::move(outs), std::move(parents), std::move(t));
}

}  // namespace

TEST_CASE("assemble_joint of two uniform bits") {
  std::vector<FactorKernel> k{bern("X", 0.5), bern("Y", 0.5)};
  JointPmf p = assemble_joint(k);
  REQUIRE(p.size() == 4);
  for (double q : p.probs()) CHECK(q == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("Z-channel joint and marginal") {
  // input 1 flips to 0 with probability 0.3; input 0 is noiseless
  std::vector<FactorKernel> k{bern("X", 0.5), FactorKernel({{"Y", 2}}, {"X"}, {1.0, 0.0, 0.3, 0.7})};
  JointPmf p = assemble_joint(k);
  const std::size_t i10[] = {1, 0};
  CHECK(p.at(i10) == doctest::Approx(0.15).epsilon(1e-15));
  JointPmf y = marginalize(p, {"Y"});
  const std::size_t one[] = {1};
  CHECK(y.at(one) == doctest::Approx(0.35).epsilon(1e-15));
  double s = 0;
  for (double q : p.probs()) s += q;
  CHECK(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("marginalize keeps order and identity") {
  std::mt19937_64 rng(3);
  std::vector<FactorKernel> k{random_table(rng, {{"A", 3}}, {}, 1), random_table(rng, {{"B", 2}}, {"A"}, 3)};
  JointPmf p = assemble_joint(k);
  JointPmf same = marginalize(p, {"A", "B"});
  REQUIRE(same.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(same.probs()[i] == p.probs()[i]);
  JointPmf swapped = marginalize(p, {"B", "A"});
  CHECK(swapped.axes()[0].name == "B");
  const std::size_t ab[] = {2, 1}, ba[] = {1, 2};
  CHECK(swapped.at(ba) == doctest::Approx(p.at(ab)).epsilon(1e-15));
  JointPmf x = marginalize(assemble_joint(std::vector<FactorKernel>{bern("X", 0.5), bern("Y", 0.5)}), {"X"});
  CHECK(x.probs()[0] == doctest::Approx(0.5));
}

TEST_CASE("entropy values") {
  CHECK(entropy(assemble_joint(std::vector<FactorKernel>{bern("X", 0.5)}), {"X"}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(entropy(assemble_joint(std::vector<FactorKernel>{bern("X", 0.0)}), {"X"}) == 0.0);
  double h = entropy(assemble_joint(std::vector<FactorKernel>{bern("X", 0.11)}), {"X"});
  CHECK(h == doctest::Approx(h2(0.11)).epsilon(1e-14));
  CHECK(std::abs(h - 0.49991) < 1e-5);
}

TEST_CASE("conditional MI against enumeration, chain rule and data processing") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<FactorKernel> k{random_table(rng, {{"A", 2}}, {}, 1), random_table(rng, {{"B", 3}}, {"A"}, 2),
                                random_table(rng, {{"C", 2}}, {"B"}, 3), random_table(rng, {{"D", 2}}, {"A", "C"}, 4)};
    JointPmf p = assemble_joint(k);
    EntropyTable et(p);
    CHECK(cond_mi_discrete(p, {"A"}, {"C"}, {"D"}) == doctest::Approx(brute_cmi(p, {"A"}, {"C"}, {"D"})).epsilon(1e-10));
    CHECK(et.cond_mi({"A", "B"}, {"D"}, {"C"}) == doctest::Approx(brute_cmi(p, {"A", "B"}, {"D"}, {"C"})).epsilon(1e-10));
    // I(A;BC) = I(A;B) + I(A;C|B)
    double lhs = cond_mi_discrete(p, {"A"}, {"B", "C"}, {});
    double rhs = cond_mi_discrete(p, {"A"}, {"B"}, {}) + cond_mi_discrete(p, {"A"}, {"C"}, {"B"});
    CHECK(std::abs(lhs - rhs) < 1e-12);
    // A -> B -> C is Markov
    CHECK(cond_mi_discrete(p, {"A"}, {"C"}, {}) <= cond_mi_discrete(p, {"A"}, {"B"}, {}) + 1e-10);
    CHECK(cond_mi_discrete(p, {"A"}, {"C"}, {"B"}) < 1e-12);
  }
}

TEST_CASE("independent variable carries no information") {
  std::vector<FactorKernel> k{bern("A", 0.3), bern("B", 0.6), FactorKernel({{"C", 2}}, {"B"}, {0.9, 0.1, 0.2, 0.8})};
  JointPmf p = assemble_joint(k);
  CHECK(cond_mi_discrete(p, {"A"}, {"B", "C"}, {}) < 1e-15);
  CHECK(cond_mi_discrete(p, {"A"}, {"B"}, {"C"}) < 1e-15);
}

TEST_CASE("kernel and joint errors") {
  CHECK_THROWS_AS(assemble_joint(std::vector<FactorKernel>{FactorKernel({{"Y", 2}}, {"X"}, {0.5, 0.5, 0.5, 0.5})}), Error);
  try {
    assemble_joint(std::vector<FactorKernel>{FactorKernel({{"Y", 2}}, {"X"}, {0.5, 0.5, 0.5, 0.5})});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownParent);
  }
  try {
    assemble_joint(std::vector<FactorKernel>{FactorKernel({{"X", 2}}, {}, {0.5, 0.6})});
    FAIL("expected NotNormalized");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotNormalized);
  }
  try {
    assemble_joint(std::vector<FactorKernel>{bern("X", 0.5), bern("X", 0.5)});
    FAIL("expected DuplicateName");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicateName);
  }
  try {
    JointPmf big({{"A", 1u << 14}, {"B", 1u << 13}}, std::vector<double>{});
    FAIL("expected SizeGuardExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SizeGuardExceeded);
  }
  JointPmf p = assemble_joint(std::vector<FactorKernel>{bern("X", 0.5)});
  try {
    entropy(p, {"Q"});
    FAIL("expected UnknownVariable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownVariable);
  }
}

TEST_CASE("linear Gaussian covariance and MI") {
  LinearGaussianSystem s;
  s.add("X", {}, 3.0);
  CHECK(s.variance("X") == doctest::Approx(3.0));
  s = add_variable(s, "Z", {}, 1.0);
  CHECK(cond_mi_gaussian(s, {"X"}, {"Z"}, {}) == 0.0);

  LinearGaussianSystem t;
  t.add("X", {}, 1.0);
  t.add("Y", {{"X", 1.0}}, 1.0);
  CHECK(cond_mi_gaussian(t, {"X"}, {"Y"}, {}) == doctest::Approx(0.5).epsilon(1e-14));
  t.add("Xa", {{"X", 1.0}});
  try {
    cond_mi_gaussian(t, {"X"}, {"Xa"}, {});
    FAIL("expected InfiniteMutualInformation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfiniteMutualInformation);
  }
  // conditioning on an alias of the target removes everything
  CHECK(cond_mi_gaussian(t, {"X"}, {"Y"}, {"Xa"}) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("Gaussian MI matches log-determinant formula") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  auto logdet = [](const Eigen::MatrixXd& m) { return m.rows() == 0 ? 0.0 : std::log2(m.determinant()); };
  for (int rep = 0; rep < 50; ++rep) {
    LinearGaussianSystem s;
    s.add("A", {}, 1.0);
    s.add("B", {{"A", n01(rng)}}, 0.5);
    s.add("C", {{"A", n01(rng)}, {"B", n01(rng)}}, 0.3);
    s.add("D", {{"C", n01(rng)}, {"A", n01(rng)}}, 0.7);
    double mi = cond_mi_gaussian(s, {"A", "B"}, {"D"}, {"C"});
    double ref = 0.5 * (logdet(s.covariance(VarSet{"A", "B", "C"})) + logdet(s.covariance(VarSet{"D", "C"})) -
                        logdet(s.covariance(VarSet{"A", "B", "C", "D"})) - logdet(s.covariance(VarSet{"C"})));
    CHECK(mi == doctest::Approx(ref).epsilon(1e-9));
    // reparameterization: scaling and mixing within a set leaves MI unchanged
    s.add("A2", {{"A", 2.0}, {"B", -3.0}});
    s.add("B2", {{"B", 0.5}});
    CHECK(cond_mi_gaussian(s, {"A2", "B2"}, {"D"}, {"C"}) == doctest::Approx(mi).epsilon(1e-9));
  }
}

TEST_CASE("Gaussian MI agrees with a finely quantized discrete model") {
  // X ~ N(0,1), Y = X + N(0,1): quantize Y on a fine grid given a fine grid of X
  const int nx = 161, ny = 241;
  const double dx = 12.0 / (nx - 1), dy = 18.0 / (ny - 1);
  std::vector<double> px(nx), tab(static_cast<std::size_t>(nx) * ny);
  double sx = 0;
  for (int i = 0; i < nx; ++i) sx += px[i] = std::exp(-0.5 * std::pow(-6.0 + i * dx, 2));
  for (auto& v : px) v /= sx;
  for (int i = 0; i < nx; ++i) {
    double x = -6.0 + i * dx, s = 0;
    for (int j = 0; j < ny; ++j) s += tab[i * ny + j] = std::exp(-0.5 * std::pow(-9.0 + j * dy - x, 2));
    for (int j = 0; j < ny; ++j) tab[i * ny + j] /= s;
  }
  std::vector<FactorKernel> k{FactorKernel({{"X", std::size_t(nx)}}, {}, px),
                              FactorKernel({{"Y", std::size_t(ny)}}, {"X"}, tab)};
  double discrete = cond_mi_discrete(assemble_joint(k), {"X"}, {"Y"}, {});
  LinearGaussianSystem s;
  s.add("X", {}, 1.0);
  s.add("Y", {{"X", 1.0}}, 1.0);
  CHECK(std::abs(discrete - cond_mi_gaussian(s, {"X"}, {"Y"}, {})) < 0.02);
}
