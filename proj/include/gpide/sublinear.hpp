#pragma once

#include <array>
#include <functional>
#include <utility>

#include "gpide/quadrature.hpp"
#include "gpide/uncertainty.hpp"

namespace gpide::step {

/// How the (q, sigma^2) supremum is searched: coarse tensor grid followed by
/// coordinate-wise golden-section refinement.
struct ParamSearchConfig {
    int coarse_q = 9;
    int coarse_s2 = 9;
    double refine_tol = 1e-8;  ///< parameter-space tolerance
    int refine_sweeps = 2;     ///< alternating per-axis sweeps
};

/// Immutable bundle for one-step sublinear expectations.  wk rules are built
/// at the four corners of the (k1,k2) box -- the law is affine in (k1,k2),
/// so the corner supremum is exact -- and their weights are renormalized to
/// unit mass so constants are preserved exactly; the discarded tail mass is
/// kept in tail_remainder for the solver's error report.
struct StepContext {
    double h = 0.0;
    unc::UncertaintyBox box;
    quad::QuadratureRule gaussian;
    std::array<quad::QuadratureRule, 4> wk;  ///< corner order: (lo,lo),(lo,hi),(hi,lo),(hi,hi)
    std::array<std::pair<double, double>, 4> corners;
    ParamSearchConfig search;
};

/// Assemble a StepContext.  `tail` carries the model constants a1, a2,
/// beta_tail shared by all four corner laws.
StepContext make_step_context(double h, const unc::UncertaintyBox& box,
                              const unc::StableParams& tail, int gaussian_order = 16,
                              int interior_order = 64, double radius = 200.0,
                              ParamSearchConfig search = {});

using Field3 = std::function<double(double, double, double)>;

/// Classical inner expectation for one parameter triple:
///   sum_i sum_j w_i w'_j v(x + sqrt(h*sigma2) xi_i, y + h q, z + h^{1/alpha} zeta_j).
double inner_expectation(const StepContext& ctx, const Field3& v,
                         const std::array<double, 3>& point, double q, double sigma2,
                         int k_corner);

struct SupResult {
    double value = 0.0;
    double k1 = 0.0, k2 = 0.0;  ///< argmax corner
    double q = 0.0, sigma2 = 0.0;
};

/// Outer supremum over the uncertainty box.  Exact over (k1,k2) by corner
/// enumeration; searched over (q,sigma2) per ParamSearchConfig.  Candidates
/// are visited in ascending parameter order and only strict improvements
/// replace the incumbent, so ties resolve to the smallest parameters.
SupResult sup_step(const StepContext& ctx, const Field3& v, const std::array<double, 3>& point);

}  // namespace gpide::step
