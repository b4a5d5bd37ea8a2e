#include "gpide/generator.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace gpide::gen {

namespace {

std::array<std::pair<double, double>, 4> box_corners(const unc::UncertaintyBox& box) {
    return {{{box.lambda_lo, box.lambda_lo},
             {box.lambda_lo, box.lambda_hi},
             {box.lambda_hi, box.lambda_lo},
             {box.lambda_hi, box.lambda_hi}}};
}

/// sup over the k-box of the compensated jump integral.  The integral is
/// linear in (k1,k2), so the corner maximum is exact; corners are visited in
/// ascending order and only strict improvements replace the incumbent.
double sup_jump_integral(const quad::C3Fn& phi, double z, const unc::UncertaintyBox& box,
                         const GeneratorQuadrature& qcfg) {
    bool first = true;
    double best = 0.0;
    for (auto [k1, k2] : box_corners(box)) {
        const double val = quad::stable_generator_integral(k1, k2, phi, z, box.alpha, qcfg.split,
                                                           qcfg.lambda_cut, qcfg.panel_order)
                               .value;
        if (first || val > best) {
            first = false;
            best = val;
        }
    }
    return best;
}

}  // namespace

double eval_G(const GeneratorInput& inp, const unc::UncertaintyBox& box,
              const GeneratorQuadrature& qcfg) {
    const double drift = std::max(box.gamma_lo * inp.p, box.gamma_hi * inp.p);
    const double diff = 0.5 * std::max(box.sigma2_lo * inp.A, box.sigma2_hi * inp.A);
    return sup_jump_integral(inp.phi, inp.z, box, qcfg) + drift + diff;
}

double consistency_residual(const quad::C3Fn& phi, double z, double s, double p, double A,
                            const unc::UncertaintyBox& box, const GeneratorQuadrature& qcfg) {
    if (!(s > 0.0 && s <= 1.0))
        fail(Errc::ConfigError, "consistency_residual: s must lie in (0,1]");

    // One-step side.  The product structure of Theta splits the supremum of
    // the sum into the sum of suprema, exactly as in the generator.
    bool first = true;
    double jump_step = 0.0;
    for (auto [k1, k2] : box_corners(box)) {
        unc::StableParams params = qcfg.tail;
        params.alpha = box.alpha;
        params.k1 = k1;
        params.k2 = k2;
        const unc::WkLaw law(params);
        const double val = quad::scaled_wk_expectation(law, phi, z, s, qcfg.lambda_cut,
                                                       qcfg.interior_order, qcfg.panel_order);
        if (first || val > jump_step) {
            first = false;
            jump_step = val;
        }
    }
    const double drift_step = s * std::max(box.gamma_lo * p, box.gamma_hi * p);
    // E^[ (1/2) A s X^2 ] = (1/2) s max(A sigma2) over Sigma.
    const double diff_step = 0.5 * s * std::max(box.sigma2_lo * A, box.sigma2_hi * A);

    const double one_step = jump_step + drift_step + diff_step;

    GeneratorInput g;
    g.p = p;
    g.A = A;
    g.phi = phi;
    g.z = z;
    const double sg = s * eval_G(g, box, qcfg);

    return std::fabs(one_step - sg) / s;
}

double lhat_bound(double norm_d1, double norm_d2, double s, double q0, double C_alpha_beta,
                  double alpha) {
    if (!(s > 0.0 && s <= 1.0)) fail(Errc::ConfigError, "lhat_bound: s must lie in (0,1]");
    return C_alpha_beta * ((norm_d1 + norm_d2) * std::pow(s, q0) +
                           norm_d2 * std::pow(s, (2.0 - alpha) / alpha));
}

double q0_from_beta(double alpha, double beta_tail, double eps0) {
    if (!(beta_tail > alpha))
        fail(Errc::BetaOutOfRange, "q0_from_beta: beta_tail must exceed alpha");
    const double diffusive = (2.0 - alpha) / alpha;
    if (beta_tail == 2.0) return diffusive - eps0;
    return std::min((beta_tail - alpha) / alpha, diffusive);
}

}  // namespace gpide::gen
