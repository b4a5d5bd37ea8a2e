#include "gpide/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "gpide/errors.hpp"
#include "gpide/quadrature.hpp"
#include "gpide/reduce.hpp"

namespace gpide::analysis {

namespace {

constexpr double kAbsNormalMoment3 = 1.5957691216057308;  // E|N(0,1)|^3 = 2 sqrt(2/pi)

std::array<std::pair<double, double>, 4> box_corners(const unc::UncertaintyBox& box) {
    return {{{box.lambda_lo, box.lambda_lo},
             {box.lambda_lo, box.lambda_hi},
             {box.lambda_hi, box.lambda_lo},
             {box.lambda_hi, box.lambda_hi}}};
}

void check_delta(double alpha, double delta) {
    const double lo = std::max(0.75 * alpha, 1.0);
    if (!(delta > lo && delta < alpha)) {
        std::ostringstream msg;
        msg << "delta = " << delta << " outside the admissible window (max(3a/4,1), a) = ("
            << lo << ", " << alpha << ")";
        fail(Errc::DeltaOutOfRange, msg.str());
    }
}

/// max_{n <= N_max} E^[n^{-1/alpha} |S_n^3|] through the z-only lattice
/// recursion with phi(z) = |z|.  Edge clamping can only shrink |z| reads,
/// so the result is a lower bound on the true supremum.
double mz_proxy(const unc::UncertaintyBox& box, const unc::StableParams& tail, int N_max,
                const ProxyOptions& opt) {
    std::array<quad::QuadratureRule, 4> rules;
    {
        int c = 0;
        for (auto [k1, k2] : box_corners(box)) {
            unc::StableParams p = tail;
            p.alpha = box.alpha;
            p.k1 = k1;
            p.k2 = k2;
            rules[static_cast<std::size_t>(c)] =
                quad::wk_rule(unc::WkLaw(p), opt.interior_order, opt.radius);
            auto& r = rules[static_cast<std::size_t>(c)];
            const double total = pairwise_sum(r.weights);
            for (double& w : r.weights) w /= total;
            ++c;
        }
    }

    const int half = std::max(1, static_cast<int>(std::lround(opt.z_radius / opt.dz)));
    const int nz = 2 * half + 1;
    std::vector<double> cur(static_cast<std::size_t>(nz)), next(static_cast<std::size_t>(nz)),
        cand(static_cast<std::size_t>(nz));

    double best = 0.0;
    for (int n = 1; n <= N_max; ++n) {
        const double h = 1.0 / n;
        const double scale = std::pow(h, 1.0 / box.alpha);
        std::array<quad::LatticeKernel, 4> kern;
        for (int c = 0; c < 4; ++c)
            kern[static_cast<std::size_t>(c)] =
                quad::lattice_project_kernel(rules[static_cast<std::size_t>(c)], scale, opt.dz);

        for (int i = 0; i < nz; ++i) cur[static_cast<std::size_t>(i)] = std::fabs(i - half) * opt.dz;
        for (int step = 0; step < n; ++step) {
            for (int c = 0; c < 4; ++c) {
                const quad::LatticeKernel& k = kern[static_cast<std::size_t>(c)];
                for (int i = 0; i < nz; ++i) {
                    double acc = 0.0;
                    for (std::size_t t = 0; t < k.offsets.size(); ++t) {
                        const int j = std::clamp(i + k.offsets[t], 0, nz - 1);
                        acc += k.weights[t] * cur[static_cast<std::size_t>(j)];
                    }
                    cand[static_cast<std::size_t>(i)] = acc;
                }
                if (c == 0)
                    next = cand;
                else
                    for (int i = 0; i < nz; ++i)
                        next[static_cast<std::size_t>(i)] = std::max(
                            next[static_cast<std::size_t>(i)], cand[static_cast<std::size_t>(i)]);
            }
            cur.swap(next);
        }
        best = std::max(best, cur[static_cast<std::size_t>(half)]);
    }
    return best;
}

}  // namespace

double default_delta(double alpha) {
    return 0.5 * (std::max(0.75 * alpha, 1.0) + alpha);
}

MomentSet compute_moments(const unc::UncertaintyBox& box, const unc::StableParams& tail,
                          double delta, int N_max, double C_phi, const ProxyOptions& proxy) {
    check_delta(box.alpha, delta);
    if (N_max < 1) fail(Errc::ConfigError, "compute_moments: N_max must be >= 1");

    MomentSet m;
    m.delta = delta;
    m.C_phi = C_phi;
    m.M_X2 = std::max(box.sigma2_lo, box.sigma2_hi);
    m.M_X3 = std::pow(m.M_X2, 1.5) * kAbsNormalMoment3;
    m.M_Y1 = std::max(std::fabs(box.gamma_lo), std::fabs(box.gamma_hi));
    m.M_Y2 = m.M_Y1 * m.M_Y1;

    for (auto [k1, k2] : box_corners(box)) {
        unc::StableParams p = tail;
        p.alpha = box.alpha;
        p.k1 = k1;
        p.k2 = k2;
        const unc::WkLaw law(p);
        m.M_Zdelta = std::max(m.M_Zdelta, unc::wk_fractional_moment(law, delta));
        m.M_Z1 = std::max(m.M_Z1, unc::wk_fractional_moment(law, 1.0));
    }

    m.M_Z_proxy = mz_proxy(box, tail, N_max, proxy);
    m.C0 = std::max(C_phi * (std::sqrt(m.M_X2) + m.M_Y1 + m.M_Z_proxy), C_phi);
    m.M0 = m.M_X2 + m.M_X3 + m.M_Y1 + m.M_Y2 +
           std::cbrt(m.M_X3) * std::pow(m.M_Zdelta, 2.0 / 3.0) +
           std::sqrt(m.M_Y2) * std::sqrt(m.M_Z1) + m.M_Z1;
    return m;
}

double rate_exponent(double alpha, double delta, double q0) {
    if (!(alpha > 1.0 && alpha < 2.0))
        fail(Errc::AlphaOutOfRange, "rate_exponent: alpha must lie in (1,2)");
    check_delta(alpha, delta);
    if (!(q0 > 0.0)) fail(Errc::ConfigError, "rate_exponent: q0 must be positive");
    const double t1 = (4.0 * delta - 3.0 * alpha) / (2.0 * alpha * (2.0 * delta + 3.0));
    const double t2 = (2.0 - alpha) / (2.0 * alpha);
    const double t3 = 0.5 * q0;
    return std::min({t1, t2, t3});
}

ErrorBudget error_budget(double eps, double h, const MomentSet& moments, double K_zeta,
                         const LhatTerms& lhat) {
    if (!(eps > 0.0 && eps < 1.0 && h > 0.0 && h < 1.0))
        fail(Errc::ConfigError, "error_budget: eps and h must lie in (0,1)");
    const double alpha = lhat.alpha;
    const double delta = moments.delta;
    const double base = 4.0 * moments.C0 * K_zeta * moments.M0;
    const double jump_pow = (4.0 * delta - 3.0 * alpha) / (6.0 * alpha);
    const double lhat_term =
        lhat.C_alpha_beta * ((lhat.norm_d1 + lhat.norm_d2) * std::pow(h, lhat.q0) +
                             lhat.norm_d2 * std::pow(h, (2.0 - alpha) / alpha));

    auto e2_at = [&](double e) {
        return base * (2.0 * std::pow(e, -3.0) * h + 5.0 * std::pow(e, -2.0) * std::sqrt(h) +
                       std::pow(e, -2.0 * delta / 3.0) * std::pow(h, jump_pow) +
                       std::pow(e, -0.5) * std::pow(h, 1.0 / (2.0 * alpha))) +
               lhat_term;
    };
    auto e1_at = [&](double e) {
        return base * (e + std::sqrt(h)) *
                   (2.0 * std::pow(e, -4.0) * h + 5.0 * std::pow(e, -3.0) * std::sqrt(h) +
                    std::pow(e, -(2.0 * delta + 3.0) / 3.0) * std::pow(h, jump_pow) +
                    std::pow(e, -1.5) * std::pow(h, 1.0 / (2.0 * alpha))) +
               lhat_term;
    };

    ErrorBudget b;
    b.eps = eps;
    b.h = h;
    b.K_zeta = K_zeta;
    b.C0 = moments.C0;
    b.M0 = moments.M0;
    b.E1 = e1_at(eps);
    b.E2 = e2_at(eps);
    b.gamma = rate_exponent(alpha, delta, lhat.q0);

    bool first = true;
    for (int i = 1; i <= 64; ++i) {
        const double g = 0.5 * i / 64.0;
        const double e = std::pow(h, g);
        const double total = 4.0 * moments.C0 * e + e2_at(e);
        if (first || total < b.total_min) {
            first = false;
            b.total_min = total;
            b.eps_star = e;
        }
    }
    return b;
}

RateReport fit_order(const std::vector<std::pair<int, double>>& pairs, double reference,
                     double theory_order, double noise_floor, bool allow_exact) {
    if (pairs.size() < 4) fail(Errc::ConfigError, "fit_order: need at least 4 (n, value) pairs");
    if (!std::isfinite(reference)) fail(Errc::ConfigError, "fit_order: reference must be finite");

    RateReport rep;
    rep.reference = reference;
    rep.theory_order = theory_order;
    std::vector<double> lx, ly;
    int prev_n = 0;
    for (const auto& [n, v] : pairs) {
        if (n <= prev_n) fail(Errc::ConfigError, "fit_order: n values must be strictly increasing");
        prev_n = n;
        rep.n_values.push_back(n);
        rep.functional_values.push_back(v);
        const double r = std::fabs(v - reference);
        if (r < 10.0 * noise_floor) continue;  // indistinguishable from quadrature noise
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(r));
    }
    rep.used_points = static_cast<int>(lx.size());

    if (lx.empty() && allow_exact) {
        rep.exact = true;
        rep.fitted_order = std::numeric_limits<double>::infinity();
        rep.pass = true;
        return rep;
    }
    if (lx.size() < 3)
        fail(Errc::DegenerateFit,
             "fit_order: fewer than 3 residuals above the noise floor; the values are "
             "indistinguishable from the reference");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double np = static_cast<double>(lx.size());
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = np * sxx - sx * sx;
    if (!(std::fabs(denom) > 0.0))
        fail(Errc::DegenerateFit, "fit_order: singular least-squares system");
    rep.fitted_order = -(np * sxy - sx * sy) / denom;
    if (!std::isfinite(rep.fitted_order))
        fail(Errc::DegenerateFit, "fit_order: non-finite fitted order");
    rep.pass = rep.fitted_order >= theory_order - 0.02;
    return rep;
}

}  // namespace gpide::analysis
