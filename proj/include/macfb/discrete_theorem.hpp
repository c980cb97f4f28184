#pragma once

// Achievable region for finite-alphabet MACs with rate-limited feedback:
// kernel validation, assembly of the two-block joint, the mutual-information
// terms, and the rate-splitting feasibility system with its equivalence check.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "macfb/joint_pmf.hpp"
#include "macfb/rate_terms.hpp"

namespace macfb {

/// P(Y|X1,X2): outputs {Y}, parents {X1, X2}.
struct ChannelSpec {
  std::size_t card_x1 = 2;
  std::size_t card_x2 = 2;
  std::size_t card_y = 2;
  FactorKernel law;
};

/// The auxiliary kernels of one block, plus the linkage kernels that draw
/// (V1, V2) from the previous block. Linkage parents use tilde() names.
struct AuxKernels {
  FactorKernel pW;    // W
  FactorKernel pV;    // V1 V2
  FactorKernel pU1;   // U1 | W V1
  FactorKernel pU2;   // U2 | W V2
  FactorKernel pX1;   // X1 | W U1 V1
  FactorKernel pX2;   // X2 | W U2 V2
  FactorKernel pY12;  // Y12 | Y W
  FactorKernel pY1;   // Y1 | W Y Y12
  FactorKernel pY2;   // Y2 | W Y Y12
  FactorKernel link1; // V1 | t_W t_V1 t_V2 t_Y12 t_U1
  FactorKernel link2; // V2 | t_W t_V1 t_V2 t_Y12 t_U2
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double deviation = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
};

inline constexpr double kKernelTolerance = 1e-12;
inline constexpr double kLinkageTolerance = 1e-9;

ValidationReport validate(const ChannelSpec& c, const AuxKernels& k);

/// The eleven single-block variables in assembly order.
const std::vector<std::string>& block_variables();

/// Single-block joint from the auxiliary chain with P_{V1V2} = k.pV.
JointPmf assemble_single_block(const ChannelSpec& c, const AuxKernels& k);

/// Joint over both blocks (22 variables). Throws InconsistentKernels if
/// validation fails.
JointPmf assemble_two_block_joint(const ChannelSpec& c, const AuxKernels& k);

MacMiTerms theorem_terms(const JointPmf& joint);

/// Region with V1 = V2 = empty evaluated on a single-block joint; bSumA holds
/// I(X1X2;Y) and bSumB the min/min sum bound.
RegionBounds decoupled_bounds_discrete(const JointPmf& single_block);

struct RateSplitWitness {
  double r1p = 0.0;
  double r2p = 0.0;
  double r0 = 0.0;
  bool r0_degenerate = false;  // bW == 0, so R0 = 0 is the only choice
};

/// Searches (R1', R2') for the rate-splitting system; nullopt if infeasible.
std::optional<RateSplitWitness> inner_feasible(const MacMiTerms& t, double r1, double r2, double rfb);

struct EquivalenceDisagreement {
  double r1 = 0.0;
  double r2 = 0.0;
  bool outer = false;  // membership per the region bounds
  bool inner = false;  // rate-splitting feasibility
};

struct EquivalenceReport {
  std::size_t samples = 0;
  std::size_t in_band = 0;
  std::size_t inside = 0;
  std::vector<EquivalenceDisagreement> disagreements;
};

inline constexpr double kBoundaryBand = 1e-6;

/// Compares region membership with rate-splitting feasibility on random rate
/// pairs. Throws InvalidParams if d1 + d2 < d12.
EquivalenceReport region_equivalence_check(const MacMiTerms& t, double rfb, std::size_t samples,
                                           std::uint64_t seed);

/// Alphabet sizes for random instances.
struct InstanceShape {
  std::size_t w = 2, v1 = 2, v2 = 2, u1 = 2, u2 = 2, x1 = 2, x2 = 2, y = 2, y12 = 2, y1 = 1, y2 = 1;
};

/// Random kernel of the given shape with strictly positive Dirichlet(1) slices.
FactorKernel random_kernel(std::mt19937_64& rng, std::vector<Axis> outputs, std::vector<std::string> parents,
                           std::size_t parent_configs);

/// Random channel and auxiliary kernels; P_{V1V2} is set to the marginal the
/// linkage kernels induce, so validation always passes.
std::pair<ChannelSpec, AuxKernels> random_instance(std::mt19937_64& rng, const InstanceShape& shape);

/// Channel plus degenerate auxiliaries (all singleton except X1, X2, whose
/// input pmfs are given): the no-feedback special case.
AuxKernels degenerate_aux(const std::vector<double>& px1, const std::vector<double>& px2, std::size_t card_y);

}  // namespace macfb
