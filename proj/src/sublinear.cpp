#include "gpide/sublinear.hpp"

#include <cmath>
#include <vector>

#include "gpide/reduce.hpp"

namespace gpide::step {

StepContext make_step_context(double h, const unc::UncertaintyBox& box,
                              const unc::StableParams& tail, int gaussian_order,
                              int interior_order, double radius, ParamSearchConfig search) {
    if (!(h > 0.0 && h < 1.0)) fail(Errc::ConfigError, "make_step_context: h must lie in (0,1)");
    StepContext ctx;
    ctx.h = h;
    ctx.box = box;
    ctx.search = search;
    ctx.gaussian = quad::gaussian_rule(gaussian_order);
    ctx.corners = {{{box.lambda_lo, box.lambda_lo},
                    {box.lambda_lo, box.lambda_hi},
                    {box.lambda_hi, box.lambda_lo},
                    {box.lambda_hi, box.lambda_hi}}};
    for (int c = 0; c < 4; ++c) {
        unc::StableParams p = tail;
        p.alpha = box.alpha;
        p.k1 = ctx.corners[c].first;
        p.k2 = ctx.corners[c].second;
        ctx.wk[c] = quad::wk_rule(unc::WkLaw(p), interior_order, radius);
        // Renormalize to unit mass: axiom (d) (constant preservation) then
        // holds to machine precision; the discarded tail stays recorded in
        // tail_remainder for the solve summary.
        double total = pairwise_sum(ctx.wk[c].weights);
        for (double& w : ctx.wk[c].weights) w /= total;
    }
    return ctx;
}

double inner_expectation(const StepContext& ctx, const Field3& v,
                         const std::array<double, 3>& point, double q, double sigma2,
                         int k_corner) {
    const quad::QuadratureRule& gw = ctx.gaussian;
    const quad::QuadratureRule& zw = ctx.wk[static_cast<std::size_t>(k_corner)];
    const double sx = std::sqrt(ctx.h * sigma2);
    const double y = point[1] + ctx.h * q;
    const double zscale = std::pow(ctx.h, 1.0 / ctx.box.alpha);

    std::vector<double> terms(gw.nodes.size() * zw.nodes.size());
    std::size_t t = 0;
    for (std::size_t i = 0; i < gw.nodes.size(); ++i) {
        const double x = point[0] + sx * gw.nodes[i];
        for (std::size_t j = 0; j < zw.nodes.size(); ++j) {
            terms[t++] = gw.weights[i] * zw.weights[j] * v(x, y, point[2] + zscale * zw.nodes[j]);
        }
    }
    return pairwise_sum(terms);
}

namespace {

/// Golden-section maximization on [a,b]; deterministic, derivative-free.
/// Returns the bracket midpoint after the interval shrinks below tol.
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

}  // namespace

SupResult sup_step(const StepContext& ctx, const Field3& v, const std::array<double, 3>& point) {
    SupResult best;
    bool first = true;

    const bool q_free = ctx.box.gamma_hi > ctx.box.gamma_lo;
    const bool s2_free = ctx.box.sigma2_hi > ctx.box.sigma2_lo;
    const int nq = q_free ? ctx.search.coarse_q : 1;
    const int ns = s2_free ? ctx.search.coarse_s2 : 1;

    for (int c = 0; c < 4; ++c) {
        auto eval = [&](double q, double s2) {
            return inner_expectation(ctx, v, point, q, s2, c);
        };

        // Coarse tensor grid, ascending order (ties keep the smaller params).
        double bq = ctx.box.gamma_lo, bs = ctx.box.sigma2_lo;
        double bval = eval(bq, bs);
        for (int iq = 0; iq < nq; ++iq) {
            const double q = q_free ? ctx.box.gamma_lo +
                                          (ctx.box.gamma_hi - ctx.box.gamma_lo) * iq / (nq - 1)
                                    : ctx.box.gamma_lo;
            for (int is = 0; is < ns; ++is) {
                const double s2 =
                    s2_free ? ctx.box.sigma2_lo +
                                  (ctx.box.sigma2_hi - ctx.box.sigma2_lo) * is / (ns - 1)
                            : ctx.box.sigma2_lo;
                if (iq == 0 && is == 0) continue;  // already evaluated
                const double val = eval(q, s2);
                if (val > bval) {
                    bval = val;
                    bq = q;
                    bs = s2;
                }
            }
        }

        // Alternating coordinate-wise golden-section refinement, bracketed by
        // the coarse neighbours of the incumbent.
        for (int sweep = 0; sweep < ctx.search.refine_sweeps; ++sweep) {
            if (q_free) {
                const double step = (ctx.box.gamma_hi - ctx.box.gamma_lo) / (nq - 1);
                const double lo = std::max(ctx.box.gamma_lo, bq - step);
                const double hi = std::min(ctx.box.gamma_hi, bq + step);
                auto [q, val] = golden_max([&](double qq) { return eval(qq, bs); }, lo, hi,
                                           ctx.search.refine_tol);
                if (val > bval) {
                    bval = val;
                    bq = q;
                }
            }
            if (s2_free) {
                const double step = (ctx.box.sigma2_hi - ctx.box.sigma2_lo) / (ns - 1);
                const double lo = std::max(ctx.box.sigma2_lo, bs - step);
                const double hi = std::min(ctx.box.sigma2_hi, bs + step);
                auto [s2, val] = golden_max([&](double ss) { return eval(bq, ss); }, lo, hi,
                                            ctx.search.refine_tol);
                if (val > bval) {
                    bval = val;
                    bs = s2;
                }
            }
        }

        if (first || bval > best.value) {
            first = false;
            best.value = bval;
            best.k1 = ctx.corners[static_cast<std::size_t>(c)].first;
            best.k2 = ctx.corners[static_cast<std::size_t>(c)].second;
            best.q = bq;
            best.sigma2 = bs;
        }
    }
    return best;
}

}  // namespace gpide::step
