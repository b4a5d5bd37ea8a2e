#include "gpide/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "gpide/reduce.hpp"

namespace gpide::quad {

namespace {

constexpr double kPi = std::numbers::pi;

/// Standard normal CDF / PDF with an explicit shape parameter s = variance.
double normal_cdf(double x, double s) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0 * s))); }
double normal_pdf(double x, double s) {
    return std::exp(-x * x / (2.0 * s)) / std::sqrt(2.0 * kPi * s);
}

}  // namespace

QuadratureRule gauss_legendre(int order) {
    if (order < 1) fail(Errc::ConfigError, "gauss_legendre: order must be >= 1");
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev initial guess, then Newton on the recurrence.
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
            }
            pp = order * (x * p1 - p2) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[order - 1 - i] = rule.weights[i];
    }
    return rule;
}

QuadratureRule gaussian_rule(int order) {
    if (order < 2) fail(Errc::ConfigError, "gaussian_rule: order must be >= 2");
    // Gauss-Hermite against e^{-x^2}, then rescaled to the N(0,1) weight.
    std::vector<double> x(order), w(order);
    const int m = (order + 1) / 2;
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * order + 1.0) - 1.85575 * std::pow(2.0 * order + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(order), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[order - 1];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[order - 2];
        else
            z = 2.0 * z - x[order - i + 1];
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * order) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        x[order - 1 - i] = z;
        x[i] = -z;
        w[order - 1 - i] = 2.0 / (pp * pp);
        w[i] = w[order - 1 - i];
    }
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double sqrt2 = std::sqrt(2.0);
    const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = sqrt2 * x[i];
        rule.weights[i] = w[i] * inv_sqrt_pi;
    }
    return rule;
}

QuadratureRule wk_rule(const unc::WkLaw& law, int interior_order, double R, int tail_order) {
    if (R < 1.0) fail(Errc::RadiusTooSmall, "wk_rule: truncation radius must be >= 1");
    if (tail_order < 1) tail_order = interior_order;

    std::vector<std::pair<double, double>> pts;
    pts.reserve(interior_order + 2 * tail_order);

    const QuadratureRule gl_in = gauss_legendre(interior_order);
    for (int i = 0; i < interior_order; ++i) {
        const double t = gl_in.nodes[i];
        pts.emplace_back(t, gl_in.weights[i] * law.interior_density(t));
    }

    // Tails via the substitution z = e^u on [1, R].
    const QuadratureRule gl_t = gauss_legendre(tail_order);
    const double lr = std::log(R);
    for (int i = 0; i < tail_order; ++i) {
        const double u = 0.5 * (gl_t.nodes[i] + 1.0) * lr;
        const double wu = gl_t.weights[i] * 0.5 * lr;
        const double zt = std::exp(u);
        pts.emplace_back(zt, wu * zt * law.tail_density(zt));
        pts.emplace_back(-zt, wu * zt * law.tail_density(-zt));
    }

    std::sort(pts.begin(), pts.end());
    QuadratureRule rule;
    rule.nodes.reserve(pts.size());
    rule.weights.reserve(pts.size());
    for (auto& [n, wgt] : pts) {
        rule.nodes.push_back(n);
        rule.weights.push_back(wgt);
    }
    rule.tail_remainder = law.tail_mass(R);
    return rule;
}

namespace {

/// Panel Gauss-Legendre integration of `f` over [lo, hi] with the layout
/// shared by the generator integral and the scaled one-step expectation:
/// log-substitution panels (length <= 1 in log units) below 2, pi-length
/// panels above.  Panel results are combined by pairwise summation.
double panel_integrate(double lo, double hi, int order, const std::function<double(double)>& f) {
    if (!(hi > lo)) return 0.0;
    const QuadratureRule gl = gauss_legendre(order);
    std::vector<double> partials;

    auto gl_panel = [&](double a, double b, bool log_sub) {
        std::vector<double> terms(gl.nodes.size());
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            if (log_sub) {
                const double u = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
                const double lam = std::exp(u);
                terms[i] = gl.weights[i] * 0.5 * (b - a) * lam * f(lam);
            } else {
                const double lam = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
                terms[i] = gl.weights[i] * 0.5 * (b - a) * f(lam);
            }
        }
        partials.push_back(pairwise_sum(terms));
    };

    const double mid = std::clamp(2.0, lo, hi);
    if (mid > lo) {
        const double ua = std::log(lo), ub = std::log(mid);
        const int npan = std::max(1, static_cast<int>(std::ceil(ub - ua)));
        for (int p = 0; p < npan; ++p) {
            const double a = ua + (ub - ua) * p / npan;
            const double b = ua + (ub - ua) * (p + 1) / npan;
            gl_panel(a, b, true);
        }
    }
    if (hi > mid) {
        const int npan = std::max(1, static_cast<int>(std::ceil((hi - mid) / kPi)));
        for (int p = 0; p < npan; ++p) {
            const double a = mid + (hi - mid) * p / npan;
            const double b = mid + (hi - mid) * (p + 1) / npan;
            gl_panel(a, b, false);
        }
    }
    return pairwise_sum(partials);
}

}  // namespace

IntegralResult stable_generator_integral(double k1, double k2, const C3Fn& phi, double z,
                                         double alpha, double split, double lambda_cut,
                                         int panel_order) {
    if (!(split > 0.0 && split < 1.0))
        fail(Errc::ConfigError, "stable_generator_integral: split must lie in (0,1)");

    IntegralResult out;
    const double fz = phi.f(z);
    const double dz1 = phi.d1(z);

    // (a) second-order Taylor value on |l| <= split, with the third-order
    //     remainder certified.
    const double small =
        0.5 * phi.d2(z) * (k1 + k2) * std::pow(split, 2.0 - alpha) / (2.0 - alpha);
    out.error_bound +=
        (phi.norm_d3 / 6.0) * (k1 + k2) * std::pow(split, 3.0 - alpha) / (3.0 - alpha);

    // (b) compensated integrand on split <= |l| <= lambda_cut.
    auto g_right = [&](double l) {
        return (phi.f(z + l) - fz - dz1 * l) * std::pow(l, -alpha - 1.0);
    };
    auto g_left = [&](double l) {
        return (phi.f(z - l) - fz + dz1 * l) * std::pow(l, -alpha - 1.0);
    };
    const double mid =
        k2 * panel_integrate(split, lambda_cut, panel_order, g_right) +
        k1 * panel_integrate(split, lambda_cut, panel_order, g_left);

    // (c) closed-form corrections past lambda_cut; the oscillatory remainder
    //     is certified by the sup norm.
    const double tail = -fz * (k1 + k2) * std::pow(lambda_cut, -alpha) / alpha +
                        dz1 * (k1 - k2) * std::pow(lambda_cut, 1.0 - alpha) / (alpha - 1.0);
    out.error_bound += phi.norm_f * (k1 + k2) * std::pow(lambda_cut, -alpha) / alpha;

    out.value = small + mid + tail;
    return out;
}

double scaled_wk_expectation(const unc::WkLaw& law, const C3Fn& phi, double z, double s,
                             double lambda_cut, int interior_order, int panel_order) {
    const unc::StableParams& p = law.params();
    const double alpha = p.alpha, beta = p.beta_tail;
    const double sc = std::pow(s, 1.0 / alpha);
    const double fz = phi.f(z);

    // Interior |W| < 1 against the cubic density.
    const QuadratureRule gl = gauss_legendre(interior_order);
    std::vector<double> terms(gl.nodes.size());
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double t = gl.nodes[i];
        terms[i] = gl.weights[i] * law.interior_density(t) * (phi.f(z + sc * t) - fz);
    }
    const double interior = pairwise_sum(terms);

    // Tails in jump space lambda = sc * zeta: the alpha part carries exactly
    // the generator's density s * k * lambda^{-1-alpha}, the beta correction
    // an extra factor s^{(beta-alpha)/alpha}.
    const double beta_scale = std::pow(s, (beta - alpha) / alpha);
    auto d_right = [&](double l) {
        return s * (p.k2 * std::pow(l, -alpha - 1.0) +
                    p.a2 * beta * beta_scale * std::pow(l, -beta - 1.0));
    };
    auto d_left = [&](double l) {
        return s * (p.k1 * std::pow(l, -alpha - 1.0) +
                    p.a1 * beta * beta_scale * std::pow(l, -beta - 1.0));
    };
    const double tails =
        panel_integrate(sc, lambda_cut, panel_order,
                        [&](double l) { return (phi.f(z + l) - fz) * d_right(l); }) +
        panel_integrate(sc, lambda_cut, panel_order,
                        [&](double l) { return (phi.f(z - l) - fz) * d_left(l); });

    // Past the truncation (zeta > R): the -phi(z) part of the increment
    // integrates to the closed-form tail mass; the remaining phi(z + sc*zeta)
    // part is oscillatory with displacements >= lambda_cut, so no Taylor
    // correction is valid there -- it is dropped, bounded by ||phi|| * mass.
    const double R = lambda_cut / sc;
    const double mass = ((p.k1 + p.k2) / alpha) * std::pow(R, -alpha) +
                        (p.a1 + p.a2) * std::pow(R, -beta);
    return interior + tails - fz * mass;
}

LatticeKernel lattice_gaussian_kernel(double variance, double dx, int half_width) {
    if (!(variance > 0.0) || !(dx > 0.0))
        fail(Errc::ConfigError, "lattice_gaussian_kernel: variance and dx must be positive");
    if (half_width < 0)
        half_width = std::max(4, static_cast<int>(5.0 * std::sqrt(variance) / dx) + 3);

    const int M = half_width;
    auto hat_weights = [&](double s) {
        std::vector<double> w(2 * M + 1);
        for (int m = -M; m <= M; ++m) {
            const double a = (m - 1) * dx, b = m * dx, c = (m + 1) * dx;
            const double P1 = normal_cdf(b, s) - normal_cdf(a, s);
            const double X1 = s * (normal_pdf(a, s) - normal_pdf(b, s));
            const double P2 = normal_cdf(c, s) - normal_cdf(b, s);
            const double X2 = s * (normal_pdf(b, s) - normal_pdf(c, s));
            w[m + M] = (X1 - a * P1) / dx + (c * P2 - X2) / dx;
        }
        return w;
    };
    auto discrete_variance = [&](const std::vector<double>& w) {
        double v = 0.0;
        for (int m = -M; m <= M; ++m) v += w[m + M] * (m * dx) * (m * dx);
        return v;
    };

    // Bisect the continuous shape parameter until the discrete second moment
    // matches the target exactly (the hat projection smears dx^2/6 of extra
    // variance per step which would otherwise accumulate linearly in n).
    double lo = 1e-14, hi = std::max(4.0 * variance, 2.0 * dx * dx);
    for (int it = 0; it < 80; ++it) {
        const double sm = 0.5 * (lo + hi);
        if (discrete_variance(hat_weights(sm)) < variance)
            lo = sm;
        else
            hi = sm;
    }
    std::vector<double> w = hat_weights(0.5 * (lo + hi));

    LatticeKernel kern;
    double total = 0.0;
    for (double& wi : w) {
        if (wi < 0.0) wi = 0.0;
        total += wi;
    }
    kern.offsets.reserve(w.size());
    kern.weights.reserve(w.size());
    for (int m = -M; m <= M; ++m) {
        kern.offsets.push_back(m);
        kern.weights.push_back(w[m + M] / total);
    }
    return kern;
}

LatticeKernel lattice_project_kernel(const QuadratureRule& rule, double scale, double dz) {
    if (!(dz > 0.0)) fail(Errc::ConfigError, "lattice_project_kernel: dz must be positive");
    std::map<int, double> taps;

    // Pool the sub-cell displacements into a 3-tap kernel that matches their
    // mass, mean, and second moment.  Two-tap (linear interpolation) weights
    // would match only the mean; their second-moment defect acts as a
    // spurious diffusion that grows with the step count.
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double t = scale * rule.nodes[j];
        if (std::fabs(t) <= 0.5 * dz) {
            m0 += rule.weights[j];
            m1 += rule.weights[j] * t;
            m2 += rule.weights[j] * t * t;
        }
    }
    if (m0 > 0.0) {
        const double ml = m1 / m0 / dz;        // mean, lattice units
        const double vl = m2 / m0 / (dz * dz);  // second moment, lattice units
        double p1 = 0.5 * (vl + ml), pm1 = 0.5 * (vl - ml);
        if (pm1 < 0.0 || p1 < 0.0) {
            // Degenerate pooled mass (|mean| > 2nd moment): fall back to the
            // exact-mean two-tap split.
            p1 = ml > 0 ? ml : 0.0;
            pm1 = ml < 0 ? -ml : 0.0;
        }
        taps[-1] += m0 * pm1;
        taps[0] += m0 * (1.0 - p1 - pm1);
        taps[1] += m0 * p1;
    }

    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double t = scale * rule.nodes[j];
        if (std::fabs(t) <= 0.5 * dz) continue;
        const double u = t / dz;
        const int lo = static_cast<int>(std::floor(u));
        const double fr = u - lo;
        taps[lo] += rule.weights[j] * (1.0 - fr);
        taps[lo + 1] += rule.weights[j] * fr;
    }

    LatticeKernel kern;
    kern.offsets.reserve(taps.size());
    kern.weights.reserve(taps.size());
    for (auto& [off, wgt] : taps) {
        kern.offsets.push_back(off);
        kern.weights.push_back(wgt);
    }
    return kern;
}

}  // namespace gpide::quad
