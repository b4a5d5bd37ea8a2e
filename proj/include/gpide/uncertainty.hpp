#pragma once

#include <array>
#include <map>
#include <string>

#include "gpide/errors.hpp"

namespace gpide::unc {

/// The product uncertainty set Theta = L x Gamma x Sigma as six interval
/// bounds plus the stability index alpha in (1,2).
struct UncertaintyBox {
    double lambda_lo = 0;  ///< spectral-mass lower bound
    double lambda_hi = 0;
    double gamma_lo = 0;  ///< drift interval
    double gamma_hi = 0;
    double sigma2_lo = 0;  ///< variance interval
    double sigma2_hi = 0;
    double alpha = 0;
};

/// Validate a raw key/value configuration into an UncertaintyBox.
/// Collects *every* violated invariant into the error message.
UncertaintyBox validate_box(const std::map<std::string, double>& raw);

/// Spectral masses k1 = mu{-1}, k2 = mu{+1} plus the heavy-tail constants of
/// the concrete model (tail exponent beta and coefficients a1, a2).
struct StableParams {
    double alpha = 1.5;
    double k1 = 0;
    double k2 = 0;
    double a1 = 0.05;
    double a2 = 0.05;
    double beta_tail = 1.8;
};

/// The law of W_k.  Tails are fixed by the model:
///
///   F(z)     = (k1/alpha) |z|^-alpha + a1 |z|^-beta        for z <= -1,
///   1 - F(z) = (k2/alpha) z^-alpha  + a2 z^-beta           for z >= +1,
///
/// and the interior density on (-1,1) is a cubic polynomial solved from four
/// linear constraints: total mass 1, mean zero (assumption H1), and density
/// continuity with the tails at +-1.  The resulting coefficients are affine
/// in (k1,k2), which makes the supremum over the k-box exact at its corners.
class WkLaw {
public:
    /// Throws InfeasibleCompletion when the interior mass is negative or the
    /// cubic dips below zero anywhere on a 1024-cell check grid.
    explicit WkLaw(const StableParams& params);

    const StableParams& params() const noexcept { return params_; }
    const std::array<double, 4>& interior_coeffs() const noexcept { return c_; }

    double tail_mass_left() const noexcept { return tail_mass_left_; }
    double tail_mass_right() const noexcept { return tail_mass_right_; }
    double interior_mass() const noexcept { return 1.0 - tail_mass_left_ - tail_mass_right_; }

    /// Interior density (valid for |z| < 1).
    double interior_density(double z) const noexcept {
        return c_[0] + z * (c_[1] + z * (c_[2] + z * c_[3]));
    }

    /// Tail density (valid for |z| >= 1).
    double tail_density(double z) const noexcept;

    /// Density everywhere.
    double density(double z) const noexcept;

    /// Full CDF (closed-form tails, polynomial interior).
    double cdf(double z) const noexcept;

    /// P(|W| > R) for R >= 1, in closed form.
    double tail_mass(double R) const noexcept;

    /// The model's tail CDF formulas as static helpers (evaluable without
    /// constructing a full law, e.g. for infeasible parameter checks).
    static double tail_cdf_left(const StableParams& p, double z) noexcept;        // z <= -1
    static double tail_cdf_right_compl(const StableParams& p, double z) noexcept;  // 1-F, z >= 1

private:
    StableParams params_;
    std::array<double, 4> c_{};  // interior density c0 + c1 z + c2 z^2 + c3 z^3
    double tail_mass_left_ = 0;
    double tail_mass_right_ = 0;
};

/// E|W_k|^delta for delta in (0, alpha), via the tail-integral identity
/// E|W|^d = int_0^inf P(|W| > t) d t^{d-1} dt.  The t >= 1 part is closed
/// form (zero truncation remainder); the t < 1 part is polynomial-exact
/// quadrature against the interior CDF.
double wk_fractional_moment(const WkLaw& law, double delta);

}  // namespace gpide::unc
