#include "gpide/uncertainty.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace gpide::unc {

UncertaintyBox validate_box(const std::map<std::string, double>& raw) {
    static const char* keys[] = {"lambda_lo", "lambda_hi", "gamma_lo", "gamma_hi",
                                 "sigma2_lo", "sigma2_hi", "alpha"};
    std::vector<std::string> missing;
    for (const char* k : keys)
        if (!raw.count(k)) missing.push_back(k);
    if (!missing.empty()) {
        std::ostringstream os;
        os << "uncertainty box: missing field(s):";
        for (auto& m : missing) os << ' ' << m;
        fail(Errc::ConfigError, os.str());
    }

    UncertaintyBox box;
    box.lambda_lo = raw.at("lambda_lo");
    box.lambda_hi = raw.at("lambda_hi");
    box.gamma_lo = raw.at("gamma_lo");
    box.gamma_hi = raw.at("gamma_hi");
    box.sigma2_lo = raw.at("sigma2_lo");
    box.sigma2_hi = raw.at("sigma2_hi");
    box.alpha = raw.at("alpha");

    // Collect every violated invariant before failing so a bad config is
    // diagnosed in one pass.
    std::vector<std::string> order_violations;
    if (!(box.lambda_lo > 0.0)) order_violations.push_back("lambda_lo must be > 0");
    if (!(box.lambda_lo < box.lambda_hi))
        order_violations.push_back("lambda_lo must be < lambda_hi");
    if (!(box.gamma_lo <= box.gamma_hi)) order_violations.push_back("gamma_lo must be <= gamma_hi");
    if (!(box.sigma2_lo >= 0.0)) order_violations.push_back("sigma2_lo must be >= 0");
    if (!(box.sigma2_lo <= box.sigma2_hi))
        order_violations.push_back("sigma2_lo must be <= sigma2_hi");
    const bool alpha_bad = !(box.alpha > 1.0 && box.alpha < 2.0);

    if (alpha_bad || !order_violations.empty()) {
        std::ostringstream os;
        os << "uncertainty box:";
        if (alpha_bad) os << " alpha must lie strictly in (1,2);";
        for (auto& v : order_violations) os << ' ' << v << ';';
        fail(alpha_bad ? Errc::AlphaOutOfRange : Errc::OrderViolation, os.str());
    }
    return box;
}

double WkLaw::tail_cdf_left(const StableParams& p, double z) noexcept {
    const double az = std::fabs(z);
    return (p.k1 / p.alpha) * std::pow(az, -p.alpha) + p.a1 * std::pow(az, -p.beta_tail);
}

double WkLaw::tail_cdf_right_compl(const StableParams& p, double z) noexcept {
    return (p.k2 / p.alpha) * std::pow(z, -p.alpha) + p.a2 * std::pow(z, -p.beta_tail);
}

WkLaw::WkLaw(const StableParams& p) : params_(p) {
    if (!(p.alpha > 1.0 && p.alpha < 2.0))
        fail(Errc::AlphaOutOfRange, "WkLaw: alpha must lie in (1,2)");
    if (!(p.beta_tail > p.alpha))
        fail(Errc::BetaOutOfRange, "WkLaw: beta_tail must exceed alpha");
    if (p.k1 < 0 || p.k2 < 0 || p.a1 <= 0 || p.a2 <= 0)
        fail(Errc::ConfigError, "WkLaw: k1,k2 must be >= 0 and a1,a2 > 0");

    const double alpha = p.alpha, beta = p.beta_tail;
    tail_mass_left_ = p.k1 / alpha + p.a1;
    tail_mass_right_ = p.k2 / alpha + p.a2;
    const double m = 1.0 - tail_mass_left_ - tail_mass_right_;
    if (m < -1e-12) {
        std::ostringstream os;
        os << "WkLaw: tail masses sum to " << (tail_mass_left_ + tail_mass_right_)
           << " > 1; no interior completion exists for (k1=" << p.k1 << ", k2=" << p.k2
           << ", a1=" << p.a1 << ", a2=" << p.a2 << ", alpha=" << alpha << ")";
        fail(Errc::InfeasibleCompletion, os.str());
    }

    // Interior mean required by H1: minus the sum of the two tail means.
    const double tail_mean = (p.k2 - p.k1) / (alpha - 1.0) + (p.a2 - p.a1) * beta / (beta - 1.0);
    const double mu = -tail_mean;

    // Continuity with the tail densities at +-1.
    const double dens_r = p.k2 + p.a2 * beta;  // density at +1
    const double dens_l = p.k1 + p.a1 * beta;  // density at -1
    const double S = 0.5 * (dens_r + dens_l);
    const double D = 0.5 * (dens_r - dens_l);

    // Cubic c0 + c1 z + c2 z^2 + c3 z^3 on (-1,1):
    //   mass:   2 c0 + (2/3) c2          = m
    //   mean:   (2/3) c1 + (2/5) c3      = mu
    //   value:  c0 +- c1 + c2 +- c3      = dens at +-1
    c_[0] = (3.0 * m - 2.0 * S) / 4.0;
    c_[2] = S - c_[0];
    c_[1] = (15.0 * mu - 6.0 * D) / 4.0;
    c_[3] = D - c_[1];

    // Nonnegativity check on a 1024-cell grid; violation is reported, never
    // silently clipped.
    double min_dens = c_[0];
    for (int i = 0; i <= 1024; ++i) {
        const double z = -1.0 + 2.0 * i / 1024.0;
        min_dens = std::min(min_dens, interior_density(z));
    }
    if (min_dens < -1e-12) {
        std::ostringstream os;
        os << "WkLaw: interior completion dips to " << min_dens << " < 0 for (k1=" << p.k1
           << ", k2=" << p.k2 << ", a1=" << p.a1 << ", a2=" << p.a2 << ")";
        fail(Errc::InfeasibleCompletion, os.str());
    }
}

double WkLaw::tail_density(double z) const noexcept {
    const double az = std::fabs(z);
    const double alpha = params_.alpha, beta = params_.beta_tail;
    const double k = z > 0 ? params_.k2 : params_.k1;
    const double a = z > 0 ? params_.a2 : params_.a1;
    return k * std::pow(az, -alpha - 1.0) + a * beta * std::pow(az, -beta - 1.0);
}

double WkLaw::density(double z) const noexcept {
    return std::fabs(z) < 1.0 ? interior_density(z) : tail_density(z);
}

double WkLaw::cdf(double z) const noexcept {
    if (z <= -1.0) return tail_cdf_left(params_, z);
    if (z >= 1.0) return 1.0 - tail_cdf_right_compl(params_, z);
    // F(-1) plus the interior polynomial integral from -1 to z.
    const double z2 = z * z;
    const double interior = c_[0] * (z + 1.0) + c_[1] * (z2 - 1.0) / 2.0 +
                            c_[2] * (z * z2 + 1.0) / 3.0 + c_[3] * (z2 * z2 - 1.0) / 4.0;
    return tail_mass_left_ + interior;
}

double WkLaw::tail_mass(double R) const noexcept {
    const double alpha = params_.alpha, beta = params_.beta_tail;
    return ((params_.k1 + params_.k2) / alpha) * std::pow(R, -alpha) +
           (params_.a1 + params_.a2) * std::pow(R, -beta);
}

double wk_fractional_moment(const WkLaw& law, double delta) {
    const StableParams& p = law.params();
    if (!(delta > 0.0 && delta < p.alpha))
        fail(Errc::DeltaOutOfRange, "wk_fractional_moment: delta must lie in (0, alpha)");

    const auto& c = law.interior_coeffs();
    // t < 1:  P(|W| > t) = 1 - 2 c0 t - (2/3) c2 t^3, so the layer-cake
    // integral against delta t^(delta-1) dt is polynomial-exact:
    const double inner =
        1.0 - 2.0 * c[0] * delta / (delta + 1.0) - (2.0 / 3.0) * c[2] * delta / (delta + 3.0);
    // t >= 1: closed-form power-law integrals; truncation remainder is zero.
    const double outer = delta * (p.k1 + p.k2) / (p.alpha * (p.alpha - delta)) +
                         delta * (p.a1 + p.a2) / (p.beta_tail - delta);
    return inner + outer;
}

}  // namespace gpide::unc
