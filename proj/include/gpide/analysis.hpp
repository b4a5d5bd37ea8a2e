#pragma once

#include <vector>

#include "gpide/uncertainty.hpp"

namespace gpide::analysis {

/// Numerically computed mollifier constant for the standard compactly
/// supported bump (support radius 1/2) normalized to unit mass: the largest
/// mixed-derivative integral max_{1 <= i+j <= 4} int |d_t^i d_x^j zeta| over
/// the orders the error budgets actually consume.  The maximum is attained
/// by the pure fourth derivative: 2^4 * int |z1''''| = 16 * 2423.7479529...
/// Frozen from high-resolution quadrature of the closed-form derivative;
/// overridable through configs and re-verified by a unit test.
inline constexpr double kKZetaDefault = 38779.9672466;

/// Moment constants of one scheme increment under the sublinear expectation.
struct MomentSet {
    double M_X2 = 0.0;      ///< E^|X|^2 = max sigma^2
    double M_X3 = 0.0;      ///< E^|X|^3 = (max sigma)^3 E|N(0,1)|^3
    double M_Y1 = 0.0;      ///< E^|Y|   = max |gamma|
    double M_Y2 = 0.0;      ///< E^|Y|^2 = max gamma^2
    double M_Zdelta = 0.0;  ///< E^|Z|^delta, sup over (k1,k2) corners
    double M_Z1 = 0.0;      ///< E^|Z|, sup over (k1,k2) corners
    double delta = 0.0;
    double M_Z_proxy = 0.0;  ///< max_{n <= N_max} E^[n^{-1/alpha}|S_n^3|]; a LOWER bound
    double C_phi = 1.0;
    double C0 = 0.0;  ///< C_phi*(sqrt(M_X2) + M_Y1 + M_Z_proxy) v C_phi
    double M0 = 0.0;
};

/// Knobs of the 1-D z-only lattice recursion behind M_Z_proxy.
struct ProxyOptions {
    double z_radius = 128.0;
    double dz = 0.25;
    int interior_order = 64;
    double radius = 200.0;  ///< wk rule truncation
};

/// Assemble the MomentSet.  `delta` must lie in (max(3 alpha/4, 1), alpha);
/// M_Z_proxy runs the scheme machinery for n = 1..N_max and takes the max --
/// the true M_Z is a supremum over all n, so the proxy is labeled a lower
/// bound everywhere it is reported.
MomentSet compute_moments(const unc::UncertaintyBox& box, const unc::StableParams& tail,
                          double delta, int N_max = 32, double C_phi = 1.0,
                          const ProxyOptions& proxy = {});

/// Midpoint of the admissible delta window (max(3 alpha/4, 1), alpha).
double default_delta(double alpha);

/// Gamma(alpha, delta, q0) = min{ (4 delta - 3 alpha)/(2 alpha (2 delta + 3)),
///                                (2 - alpha)/(2 alpha), q0/2 }.
double rate_exponent(double alpha, double delta, double q0);

/// Inputs of the l-hat contribution shared by E1 and E2.
struct LhatTerms {
    double C_alpha_beta = 1.0;
    double q0 = 0.2;
    double norm_d1 = 1.0;  ///< ||D phi||
    double norm_d2 = 1.0;  ///< ||D^2 phi||
    double alpha = 1.5;
};

struct ErrorBudget {
    double eps = 0.0;
    double h = 0.0;
    double K_zeta = kKZetaDefault;
    double E1 = 0.0;
    double E2 = 0.0;
    double gamma = 0.0;  ///< optimal exponent from rate_exponent
    double C0 = 0.0;
    double M0 = 0.0;
    double total_min = 0.0;  ///< min over the eps grid of 4 C0 eps + E2
    double eps_star = 0.0;   ///< grid argmin
};

/// E1/E2 at the given (eps, h) plus the minimized total over the log grid
/// eps in { h^g : g in 64 uniform steps over (0, 1/2] }.
ErrorBudget error_budget(double eps, double h, const MomentSet& moments, double K_zeta,
                         const LhatTerms& lhat);

struct RateReport {
    std::vector<int> n_values;
    std::vector<double> functional_values;
    double reference = 0.0;
    double fitted_order = 0.0;
    double theory_order = 0.0;
    bool pass = false;
    int used_points = 0;  ///< pairs surviving the noise-floor exclusion
    bool exact = false;   ///< every residual below the noise floor
};

/// Least-squares slope of log|value - reference| against log n.  Pairs with
/// residual below 10x the noise floor are excluded; fewer than 3 usable
/// pairs raises DegenerateFit -- except when *all* residuals sit below the
/// floor, which is reported as an exact case (pass, exact = true).
RateReport fit_order(const std::vector<std::pair<int, double>>& pairs, double reference,
                     double theory_order, double noise_floor = 1e-12,
                     bool allow_exact = false);

}  // namespace gpide::analysis
