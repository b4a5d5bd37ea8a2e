#pragma once

#include <functional>
#include <vector>

#include "gpide/uncertainty.hpp"

namespace gpide::quad {

/// Nodes/weights plus a certified bound on the omitted tail mass.  For
/// probability rules the weights sum to the captured mass <= 1 and
/// 1 - sum(weights) <= tail_remainder.
struct QuadratureRule {
    std::vector<double> nodes;    ///< strictly increasing
    std::vector<double> weights;  ///< positive
    double tail_remainder = 0.0;
};

/// Gauss-Legendre rule on (-1,1) with unit weight function.
QuadratureRule gauss_legendre(int order);

/// Gauss-Hermite-type rule transformed to the standard normal weight:
/// sum w_i g(x_i) ~ E[g(N(0,1))], exact for polynomials of degree
/// <= 2*order - 1.
QuadratureRule gaussian_rule(int order);

/// Composite rule for the W_k law: polynomial-exact interior rule on (-1,1)
/// against the cubic density, log-substitution rules on [1,R] and [-R,-1]
/// against the closed-form tail density, and tail_remainder = F(-R) + 1-F(R).
QuadratureRule wk_rule(const unc::WkLaw& law, int interior_order = 64, double R = 200.0,
                       int tail_order = -1);

/// A scalar test section with the derivative data the singular integrals
/// need: pointwise f, f', f'' plus sup-norm bounds through third order.
struct C3Fn {
    std::function<double(double)> f;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    double norm_f = 1.0;
    double norm_d1 = 1.0;
    double norm_d2 = 1.0;
    double norm_d3 = 1.0;
};

struct IntegralResult {
    double value = 0.0;
    double error_bound = 0.0;  ///< certified Taylor + truncation remainder
};

/// The compensated alpha-stable generator integral
///
///   k1 int_{-inf}^{0} delta_l phi(z) |l|^{-alpha-1} dl
/// + k2 int_{0}^{+inf} delta_l phi(z)  l^{-alpha-1}  dl,
///
/// with delta_l phi(z) = phi(z+l) - phi(z) - phi'(z) l, computed as
/// (a) the second-order Taylor value on |l| <= split,
/// (b) panel Gauss-Legendre quadrature (log substitution near the origin,
///     pi-length panels beyond 2) on split <= |l| <= lambda_cut,
/// (c) closed-form corrections plus a certified bound past lambda_cut.
IntegralResult stable_generator_integral(double k1, double k2, const C3Fn& phi, double z,
                                         double alpha, double split = 1e-3,
                                         double lambda_cut = 1e4, int panel_order = 16);

/// One-step scaled jump expectation for the consistency check:
///
///   E[ phi(z + s^{1/alpha} W_k) ] - phi(z),
///
/// evaluated with the interior rule in W-space and panel quadrature in
/// jump (lambda = s^{1/alpha} zeta) space truncated at lambda_cut, with the
/// same panel layout as stable_generator_integral so the singular parts of
/// the two sides cancel to quadrature accuracy.  Beyond the truncation the
/// closed-form tail mass and mean corrections are applied.
double scaled_wk_expectation(const unc::WkLaw& law, const C3Fn& phi, double z, double s,
                             double lambda_cut = 1e4, int interior_order = 48,
                             int panel_order = 16);

/// Offsets/weights of a lattice kernel: taps live on integer multiples of a
/// grid spacing.
struct LatticeKernel {
    std::vector<int> offsets;     ///< strictly increasing
    std::vector<double> weights;  ///< nonnegative, sum to 1 after build
};

/// Nonnegative lattice kernel for a centred Gaussian of variance
/// `variance` on a lattice with spacing dx.  Weights are the exact
/// hat-function (P1 finite element) integrals of N(0,s), with the shape
/// parameter s calibrated by bisection so the *discrete* second moment
/// equals `variance` exactly; this removes the dx^2-per-step variance
/// inflation of naive node snapping.
LatticeKernel lattice_gaussian_kernel(double variance, double dx, int half_width = -1);

/// Project a scaled quadrature rule (displacements scale*nodes[j]) onto a
/// lattice with spacing dz.  Sub-cell displacements (|t| <= dz/2) are pooled
/// into a 3-tap kernel matching their mass, mean, and second moment; larger
/// displacements use two-tap linear splitting (exact mean).  All weights
/// stay nonnegative, so downstream operators remain monotone.
LatticeKernel lattice_project_kernel(const QuadratureRule& rule, double scale, double dz);

}  // namespace gpide::quad
