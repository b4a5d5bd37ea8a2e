#pragma once

#include "gpide/quadrature.hpp"
#include "gpide/uncertainty.hpp"

namespace gpide::gen {

/// Input for the generator G(p, A, phi(z+.)): coefficients of D_y u and
/// D_x^2 u plus a 1-D scalar section with derivative bounds.
struct GeneratorInput {
    double p = 0.0;
    double A = 0.0;
    quad::C3Fn phi;
    double z = 0.0;
};

/// Quadrature knobs shared by the generator-side integrals.
struct GeneratorQuadrature {
    double split = 1e-3;
    double lambda_cut = 1e4;
    int panel_order = 16;
    int interior_order = 48;
    unc::StableParams tail;  ///< a1, a2, beta_tail for the W_k laws
};

/// G(p, A, phi(z+.)) for the product set: the three suprema decompose, so
///   G = sup_corners(jump integral) + max(gamma*p) + (1/2) max(sigma^2*A).
double eval_G(const GeneratorInput& inp, const unc::UncertaintyBox& box,
              const GeneratorQuadrature& qcfg);

/// Consistency residual of the one-step expectation against s*G:
///
///   (1/s) | E^[phi(z+s^{1/alpha}Z) - phi(z) + s p Y + (1/2) A s X^2] - s G |.
///
/// Both sides take their supremum over the same parameter box with the same
/// quadrature machinery.
double consistency_residual(const quad::C3Fn& phi, double z, double s, double p, double A,
                            const unc::UncertaintyBox& box, const GeneratorQuadrature& qcfg);

/// The theoretical bound shape l-hat:
///   C_ab * [ (||Dphi|| + ||D2phi||) s^{q0} + ||D2phi|| s^{(2-alpha)/alpha} ].
double lhat_bound(double norm_d1, double norm_d2, double s, double q0, double C_alpha_beta,
                  double alpha);

/// q0 of the concrete model: min{(beta-alpha)/alpha, (2-alpha)/alpha}, with
/// the beta = 2 branch (2-alpha)/alpha - eps0.
double q0_from_beta(double alpha, double beta_tail, double eps0 = 0.01);

}  // namespace gpide::gen
