// Acceptance gate: runs the ten primary criteria end to end and prints one
// PASS/FAIL line per criterion.  Exit status is the number of failures.
//
// The heavy configurations are the same ones the CLI ships for its studies;
// they are embedded here so the gate has no file dependencies.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gpide/analysis.hpp"
#include "gpide/errors.hpp"
#include "gpide/generator.hpp"
#include "gpide/phi.hpp"
#include "gpide/quadrature.hpp"
#include "gpide/scheme.hpp"
#include "gpide/sublinear.hpp"
#include "gpide/uncertainty.hpp"

using namespace gpide;

namespace {

constexpr double kExpNegHalf = 0.60653065971263342;  // e^{-1/2}
constexpr double kTanh1 = 0.76159415595576485;       // tanh(1)

struct Criterion {
    int id = 0;
    std::string label;
    bool pass = false;
    std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, const std::string& label, bool pass, const std::string& detail) {
    g_results.push_back({id, label, pass, detail});
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- shared model boxes ----------------------------------------------------

unc::UncertaintyBox box_full() {
    unc::UncertaintyBox b;
    b.lambda_lo = 0.05;
    b.lambda_hi = 0.1;
    b.gamma_lo = -0.2;
    b.gamma_hi = 0.2;
    b.sigma2_lo = 0.8;
    b.sigma2_hi = 1.2;
    b.alpha = 1.5;
    return b;
}

unc::StableParams tail_sym(double a) {
    unc::StableParams t;
    t.a1 = t.a2 = a;
    return t;
}

// Minimal-feasibility jump weights used by the degenerate configurations:
// the jump part must exist (the model always carries a Levy component) but
// is made numerically negligible.
unc::UncertaintyBox box_degenerate(double gamma_lo, double gamma_hi, double s2_lo,
                                   double s2_hi) {
    unc::UncertaintyBox b;
    b.lambda_lo = 1e-3;
    b.lambda_hi = 2e-3;
    b.gamma_lo = gamma_lo;
    b.gamma_hi = gamma_hi;
    b.sigma2_lo = s2_lo;
    b.sigma2_hi = s2_hi;
    b.alpha = 1.5;
    return b;
}

scheme::Grid make_grid(double xr, int nx, double yr, int ny, double zr, int nz) {
    scheme::Grid g;
    g.x_lo = -xr;
    g.x_hi = xr;
    g.nx = nx;
    g.y_lo = -yr;
    g.y_hi = yr;
    g.ny = ny;
    g.z_lo = -zr;
    g.z_hi = zr;
    g.nz = nz;
    return g;
}

// Solve-summary ledger feeding criterion 2 (invariants on every solve).
struct InvariantRecord {
    std::string tag;
    double max_abs = 0.0;
    double sup_norm = 0.0;
    double lipschitz_ratio = 0.0;
};
std::vector<InvariantRecord> g_invariants;

double run_solve(const std::string& tag, const phi::TestFunction& tf,
                 const unc::UncertaintyBox& box, const unc::StableParams& tail, int n,
                 const scheme::Grid& grid, scheme::SolveOptions opts) {
    opts.keep_history = false;
    const scheme::SolveResult res = scheme::solve(tf, box, tail, n, grid, opts);
    g_invariants.push_back({tag + " n=" + std::to_string(n), res.summary.max_abs_value,
                            tf.sup_norm, res.summary.max_lipschitz_ratio});
    const auto& gf = res.history.back();
    return gf.interpolate(0.0, 0.0, 0.0);
}

// ---- criterion 1: sublinearity axiom suite ---------------------------------

void criterion_1() {
    const auto ctx =
        step::make_step_context(1.0 / 8.0, box_full(), tail_sym(0.05), 8, 24, 200.0, {5, 3, 1e-8, 1});

    scheme::Grid g = make_grid(3, 9, 3, 5, 3, 9);
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> pt(-1.5, 1.5);
    std::uniform_real_distribution<double> scale(0.1, 3.0);

    auto random_field = [&]() {
        auto gf = std::make_shared<scheme::GridFunction>();
        gf->grid = g;
        gf->values.resize(g.size());
        for (double& v : gf->values) v = val(rng);
        return gf;
    };

    int checked = 0;
    double worst = 0.0;
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        auto fa = random_field();
        auto fb = random_field();
        const std::array<double, 3> p{pt(rng), pt(rng), pt(rng)};
        step::Field3 F = [fa](double x, double y, double z) { return fa->interpolate(x, y, z); };
        step::Field3 G = [fb](double x, double y, double z) { return fb->interpolate(x, y, z); };
        step::Field3 FplusG = [fa, fb](double x, double y, double z) {
            return fa->interpolate(x, y, z) + fb->interpolate(x, y, z);
        };
        step::Field3 FplusAbsG = [fa, fb](double x, double y, double z) {
            return fa->interpolate(x, y, z) + std::fabs(fb->interpolate(x, y, z));
        };
        const double c = scale(rng);
        step::Field3 cF = [fa, c](double x, double y, double z) {
            return c * fa->interpolate(x, y, z);
        };
        const double k = val(rng) * 5.0;
        step::Field3 K = [k](double, double, double) { return k; };

        const double ef = step::sup_step(ctx, F, p).value;
        const double eg = step::sup_step(ctx, G, p).value;
        const double efg = step::sup_step(ctx, FplusG, p).value;
        const double emono = step::sup_step(ctx, FplusAbsG, p).value;
        const double ecf = step::sup_step(ctx, cF, p).value;
        const double ek = step::sup_step(ctx, K, p).value;

        // constant preservation, exact after mass renormalization
        worst = std::max(worst, std::fabs(ek - k));
        ok = ok && std::fabs(ek - k) <= 1e-12;
        // monotonicity: f + |g| >= f pointwise
        ok = ok && emono >= ef - 1e-9;
        // sub-additivity
        ok = ok && efg <= ef + eg + 1e-9;
        // positive homogeneity
        ok = ok && std::fabs(ecf - c * ef) <= 1e-9 * std::max(1.0, std::fabs(c * ef));
        ++checked;
    }
    record(1, "sublinearity axioms (100 random pairs)", ok,
           "pairs=" + std::to_string(checked) + " worst_const_err=" + fmt(worst));
}

// ---- criterion 3: nested-sup oracle ----------------------------------------

double gridless_two_step(const phi::TestFunction& tf, const unc::UncertaintyBox& box,
                         const unc::StableParams& tail, const step::ParamSearchConfig& search,
                         int gaussian_order, int interior_order) {
    const auto ctx =
        step::make_step_context(0.5, box, tail, gaussian_order, interior_order, 200.0, search);
    step::Field3 phi0 = tf.f;
    step::Field3 u1 = [&ctx, phi0](double x, double y, double z) {
        return step::sup_step(ctx, phi0, {x, y, z}).value;
    };
    return step::sup_step(ctx, u1, {0.0, 0.0, 0.0}).value;
}

void criterion_3() {
    struct Case {
        std::string name;
        phi::TestFunction tf;
        unc::UncertaintyBox box;
        unc::StableParams tail;
        scheme::Grid grid;
    };
    std::vector<Case> cases;

    {  // constant: preserved exactly by both realizations
        Case c{"constant", phi::make_test_function("constant", {{"value", 1.7}}), box_full(),
               tail_sym(0.05), make_grid(4, 9, 2, 5, 6, 25)};
        cases.push_back(c);
    }
    {  // pure drift: both sides equal tanh(1)
        Case c{"drift", phi::make_test_function("tanh_y"), box_degenerate(-1, 1, 0, 0),
               tail_sym(1e-3), make_grid(2, 3, 4, 65, 1, 2)};
        cases.push_back(c);
    }
    {  // affine in y: value a0 + ay * gamma_hi, exact in both realizations
        Case c{"affine-y",
               phi::make_test_function("affine", {{"a0", 0.5}, {"ay", 0.4}, {"box_radius", 4}}),
               box_degenerate(-0.3, 0.6, 0, 0), tail_sym(1e-3), make_grid(2, 3, 4, 129, 1, 2)};
        cases.push_back(c);
    }
    {  // affine in x: mean-zero Gaussian leaves the value at a0
        Case c{"affine-x",
               phi::make_test_function("affine", {{"a0", -0.25}, {"ax", 0.3}, {"box_radius", 6}}),
               box_degenerate(0, 0, 0.5, 1.5), tail_sym(1e-3), make_grid(6, 49, 1, 2, 1, 2)};
        cases.push_back(c);
    }
    {  // affine in z with a symmetric jump law: mean-zero again
        unc::UncertaintyBox b = box_degenerate(0, 0, 0, 0);
        b.lambda_lo = b.lambda_hi = 0.05;
        Case c{"affine-z",
               phi::make_test_function("affine", {{"a0", 0.75}, {"az", 0.2}, {"box_radius", 12}}),
               b, tail_sym(0.05), make_grid(1, 2, 1, 2, 12, 97)};
        cases.push_back(c);
    }

    bool ok = true;
    double worst = 0.0;
    std::string worst_name;
    for (auto& c : cases) {
        scheme::SolveOptions opts;
        opts.gaussian_order = 6;
        opts.interior_order = 16;
        opts.check_invariants = false;
        opts.boundary_tol = 100.0;
        // Coarse candidate lists include the interval endpoints, where every
        // one of these degenerate suprema is attained, so golden refinement
        // is unnecessary -- and skipping it keeps the doubly nested gridless
        // oracle tractable.
        step::ParamSearchConfig search{5, 3, 1e-9, 0};
        opts.search = search;
        const double lattice = scheme::limit_functional(c.tf, c.box, c.tail, 2, c.grid, opts);
        const double oracle = gridless_two_step(c.tf, c.box, c.tail, search, 6, 16);
        const double err = std::fabs(lattice - oracle);
        if (err > worst) {
            worst = err;
            worst_name = c.name;
        }
        ok = ok && err <= 1e-6;
    }
    record(3, "nested-sup oracle equivalence at n=2 (5 configs)", ok,
           "worst=" + fmt(worst) + " (" + worst_name + "), tol 1e-6");
}

// ---- criteria 4 + 5: degenerate closed forms -------------------------------

scheme::SolveOptions gauss_opts() {
    scheme::SolveOptions o;
    return o;
}

void criterion_4(std::string& csv_n64, const scheme::Grid*& grid_out,
                 phi::TestFunction& tf_out, unc::UncertaintyBox& box_out,
                 unc::StableParams& tail_out) {
    static const scheme::Grid grid = make_grid(6, 193, 1, 3, 8, 33);
    const auto tf = phi::make_test_function("cos_x");
    const auto box = box_degenerate(0, 0, 1, 1);
    const auto tail = tail_sym(1e-3);
    grid_out = &grid;
    tf_out = tf;
    box_out = box;
    tail_out = tail;

    std::vector<double> errs;
    bool mono = true;
    double final_err = 0.0;
    for (int n : {8, 16, 32, 64}) {
        scheme::SolveOptions opts = gauss_opts();
        opts.keep_history = false;
        const scheme::SolveResult res = scheme::solve(tf, box, tail, n, grid, opts);
        g_invariants.push_back({"gaussian n=" + std::to_string(n), res.summary.max_abs_value,
                                tf.sup_norm, res.summary.max_lipschitz_ratio});
        const double v = res.history.back().interpolate(0.0, 0.0, 0.0);
        const double e = std::fabs(v - kExpNegHalf);
        if (!errs.empty() && e > errs.back() + 1e-4) mono = false;
        errs.push_back(e);
        final_err = e;
        if (n == 64) {
            std::ostringstream os;
            scheme::write_csv(os, res.history.back());
            csv_n64 = os.str();
        }
    }
    const bool ok = final_err <= 0.02 && mono;
    record(4, "Gaussian degenerate case vs e^{-1/2}", ok,
           "err(n=64)=" + fmt(final_err) + " monotone_with_slack=" + (mono ? "yes" : "no"));
}

void criterion_5() {
    const auto tf = phi::make_test_function("tanh_y");
    const auto box = box_degenerate(-1, 1, 0, 0);
    const auto tail = tail_sym(1e-3);
    const scheme::Grid grid = make_grid(2, 5, 4, 257, 8, 33);
    bool ok = true;
    double worst = 0.0;
    for (int n : {4, 8, 16, 32}) {
        const double v = run_solve("drift", tf, box, tail, n, grid, {});
        worst = std::max(worst, std::fabs(v - kTanh1));
        ok = ok && std::fabs(v - kTanh1) <= 1e-12;
    }
    record(5, "drift degenerate case = tanh(1) exactly", ok, "worst=" + fmt(worst));
}

// ---- criteria 6 + 9: rate studies ------------------------------------------

void criterion_6(std::string& csv_n64, const scheme::Grid*& grid_out,
                 phi::TestFunction& tf_out, unc::UncertaintyBox& box_out,
                 unc::StableParams& tail_out, scheme::SolveOptions& opts_out) {
    static const scheme::Grid grid = make_grid(6, 49, 1, 3, 12, 97);
    const auto tf = phi::make_test_function("cos_x_plus_z");
    const auto box = box_full();
    const auto tail = tail_sym(0.05);
    scheme::SolveOptions opts;
    opts.radius = 2000.0;
    grid_out = &grid;
    tf_out = tf;
    box_out = box;
    tail_out = tail;
    opts_out = opts;

    std::vector<std::pair<int, double>> pairs;
    double reference = 0.0;
    for (int n : {8, 16, 32, 64, 128, 256}) {
        scheme::SolveOptions o = opts;
        o.keep_history = false;
        const scheme::SolveResult res = scheme::solve(tf, box, tail, n, grid, o);
        g_invariants.push_back({"full n=" + std::to_string(n), res.summary.max_abs_value,
                                tf.sup_norm, res.summary.max_lipschitz_ratio});
        const double v = res.history.back().interpolate(0.0, 0.0, 0.0);
        if (n == 256)
            reference = v;
        else
            pairs.emplace_back(n, v);
        if (n == 64) {
            std::ostringstream os;
            scheme::write_csv(os, res.history.back());
            csv_n64 = os.str();
        }
    }
    const double theory = analysis::rate_exponent(1.5, 1.2, 0.2);  // 1/54
    bool ok = false;
    std::string detail;
    try {
        const auto rep = analysis::fit_order(pairs, reference, theory, 1e-12, true);
        ok = rep.exact || rep.fitted_order >= theory - 0.02;
        detail = "fitted=" + (rep.exact ? std::string("exact") : fmt(rep.fitted_order)) +
                 " theory=" + fmt(theory);
    } catch (const Error& e) {
        detail = std::string("fit failed: ") + e.what();
    }
    record(6, "full-model rate study (order >= 1/54 - 0.02)", ok, detail);
}

void criterion_9() {
    const auto tf = phi::make_test_function("cos_x");
    const auto box = box_degenerate(0, 0, 1, 4);
    const auto tail = tail_sym(1e-3);
    const scheme::Grid grid = make_grid(14, 113, 1, 3, 8, 33);
    std::vector<std::pair<int, double>> pairs;
    double reference = 0.0;
    for (int n : {8, 16, 32, 64, 128}) {
        const double v = run_solve("clt", tf, box, tail, n, grid, {});
        if (n == 128)
            reference = v;
        else
            pairs.emplace_back(n, v);
    }
    bool ok = false;
    std::string detail;
    try {
        const auto rep = analysis::fit_order(pairs, reference, 1.0 / 6.0, 1e-12, true);
        ok = rep.exact || rep.fitted_order >= 1.0 / 6.0;
        detail = "fitted=" + (rep.exact ? std::string("exact") : fmt(rep.fitted_order)) +
                 " threshold=" + fmt(1.0 / 6.0);
    } catch (const Error& e) {
        detail = std::string("fit failed: ") + e.what();
    }
    record(9, "robust-CLT configuration (order >= 1/6)", ok, detail);
}

// ---- criterion 7: consistency sweep ----------------------------------------

void criterion_7() {
    const auto tf = phi::make_test_function("cos_z");
    const auto box = box_full();
    gen::GeneratorQuadrature qcfg;
    qcfg.tail = tail_sym(0.0);
    qcfg.tail.a1 = 0.10;
    qcfg.tail.a2 = 0.05;
    const quad::C3Fn section = tf.z_section(0.0, 0.0);
    const double z = std::acos(0.0);  // pi/2
    const double q0 = gen::q0_from_beta(1.5, 1.8);
    const double diff_exp = (2.0 - 1.5) / 1.5;

    std::vector<double> svals, residuals;
    for (int e = 4; e <= 12; ++e) {
        const double s = std::pow(2.0, -e);
        svals.push_back(s);
        residuals.push_back(gen::consistency_residual(section, z, s, 0.0, 0.0, box, qcfg));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double np = static_cast<double>(svals.size());
    for (std::size_t i = 0; i < svals.size(); ++i) {
        const double lx = std::log(svals[i]);
        const double ly = std::log(residuals[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    const double threshold = std::min(q0, diff_exp) - 0.05;

    auto shape = [&](double s) {
        return (section.norm_d1 + section.norm_d2) * std::pow(s, q0) +
               section.norm_d2 * std::pow(s, diff_exp);
    };
    double c_ab = 0.0;
    for (std::size_t i = 0; i < svals.size(); ++i)
        c_ab = std::max(c_ab, residuals[i] / shape(svals[i]));

    bool dominated = true;
    for (double e : {4.5, 6.5, 9.5, 11.5}) {
        const double s = std::pow(2.0, -e);
        const double r = gen::consistency_residual(section, z, s, 0.0, 0.0, box, qcfg);
        dominated = dominated && r <= c_ab * shape(s) * (1.0 + 1e-9);
    }
    const bool ok = slope >= threshold && dominated;
    record(7, "consistency sweep slope and l-hat domination", ok,
           "slope=" + fmt(slope) + " threshold=" + fmt(threshold) + " C_ab=" + fmt(c_ab) +
               " fresh_dominated=" + (dominated ? "yes" : "no"));
}

// ---- criterion 8: generator vs dense brute force ---------------------------

void criterion_8() {
    const auto box = box_full();
    gen::GeneratorQuadrature qcfg;
    qcfg.lambda_cut = 1e3;
    qcfg.panel_order = 8;
    qcfg.tail.a1 = 0.10;
    qcfg.tail.a2 = 0.05;

    std::mt19937 rng(777);
    std::uniform_real_distribution<double> zd(-3.0, 3.0);
    std::uniform_real_distribution<double> pd(-2.0, 2.0);
    std::uniform_int_distribution<int> phid(0, 2);
    const char* names[] = {"cos_z", "tanh_z", "cos_x_plus_z"};

    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto tf = phi::make_test_function(names[phid(rng)]);
        gen::GeneratorInput inp;
        inp.phi = tf.z_section(0.0, 0.0);
        inp.z = zd(rng);
        inp.p = pd(rng);
        inp.A = pd(rng);
        const double G = gen::eval_G(inp, box, qcfg);

        // Dense brute force: a 5x5 grid over the (k1,k2) box, each evaluated
        // through the singular integral directly, crossed with dense drift
        // and diffusion grids.
        double brute = -1e300;
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                const double k1 = box.lambda_lo + (box.lambda_hi - box.lambda_lo) * i / 4.0;
                const double k2 = box.lambda_lo + (box.lambda_hi - box.lambda_lo) * j / 4.0;
                const double jump =
                    quad::stable_generator_integral(k1, k2, inp.phi, inp.z, box.alpha,
                                                    qcfg.split, qcfg.lambda_cut, qcfg.panel_order)
                        .value;
                for (int a = 0; a <= 20; ++a) {
                    const double gm = box.gamma_lo + (box.gamma_hi - box.gamma_lo) * a / 20.0;
                    for (int b = 0; b <= 20; ++b) {
                        const double s2 =
                            box.sigma2_lo + (box.sigma2_hi - box.sigma2_lo) * b / 20.0;
                        brute = std::max(brute, jump + gm * inp.p + 0.5 * s2 * inp.A);
                    }
                }
            }
        }
        const double err = std::fabs(G - brute);
        worst = std::max(worst, err);
        ok = ok && err <= 1e-8;
    }
    record(8, "generator vs dense brute-force sup (50 draws)", ok,
           "worst=" + fmt(worst) + ", tol 1e-8");
}

// ---- criterion 10: determinism ---------------------------------------------

void criterion_10(const scheme::Grid* g4, const phi::TestFunction& tf4,
                  const unc::UncertaintyBox& b4, const unc::StableParams& t4,
                  const std::string& csv4, const scheme::Grid* g6,
                  const phi::TestFunction& tf6, const unc::UncertaintyBox& b6,
                  const unc::StableParams& t6, const scheme::SolveOptions& o6,
                  const std::string& csv6) {
    bool ok = true;
    for (int workers : {2, 3}) {
        {
            scheme::SolveOptions o;
            o.workers = workers;
            o.keep_history = false;
            const auto res = scheme::solve(tf4, b4, t4, 64, *g4, o);
            std::ostringstream os;
            scheme::write_csv(os, res.history.back());
            ok = ok && os.str() == csv4;
        }
        {
            scheme::SolveOptions o = o6;
            o.workers = workers;
            o.keep_history = false;
            const auto res = scheme::solve(tf6, b6, t6, 64, *g6, o);
            std::ostringstream os;
            scheme::write_csv(os, res.history.back());
            ok = ok && os.str() == csv6;
        }
    }
    record(10, "determinism across worker counts (criteria 4 and 6 configs)", ok,
           ok ? "bitwise-identical CSV for workers in {1,2,3}" : "CSV outputs differ");
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    std::string csv4, csv6;
    const scheme::Grid* g4 = nullptr;
    const scheme::Grid* g6 = nullptr;
    phi::TestFunction tf4, tf6;
    unc::UncertaintyBox b4, b6;
    unc::StableParams t4, t6;
    scheme::SolveOptions o6;

    try {
        criterion_1();
        criterion_3();
        criterion_4(csv4, g4, tf4, b4, t4);
        criterion_5();
        criterion_6(csv6, g6, tf6, b6, t6, o6);
        criterion_7();
        criterion_8();
        criterion_9();
        criterion_10(g4, tf4, b4, t4, csv4, g6, tf6, b6, t6, o6, csv6);

        // Criterion 2 draws on every solve performed above.
        bool ok = !g_invariants.empty();
        double worst_ratio = 0.0;
        for (const auto& r : g_invariants) {
            const bool bounded = r.max_abs <= r.sup_norm * (1.0 + 1e-9) + 1e-12;
            const bool lip = r.lipschitz_ratio <= 1.0 + 1e-6;
            worst_ratio = std::max(worst_ratio, r.lipschitz_ratio);
            ok = ok && bounded && lip;
        }
        record(2, "boundedness + Lipschitz invariants on every solve", ok,
               std::to_string(g_invariants.size()) + " solves, worst_lipschitz_ratio=" +
                   fmt(worst_ratio));
    } catch (const Error& e) {
        record(0, "acceptance run aborted", false, e.what());
    } catch (const std::exception& e) {
        record(0, "acceptance run aborted", false, e.what());
    }

    std::sort(g_results.begin(), g_results.end(),
              [](const Criterion& a, const Criterion& b) { return a.id < b.id; });
    int failures = 0;
    for (const auto& c : g_results) {
        if (!c.pass) ++failures;
        std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.label
                  << " [" << c.detail << "]\n";
    }
    const double secs =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count() / 1000.0;
    std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                                : "ACCEPTANCE: " + std::to_string(failures) + " criteria FAILED")
              << " (" << secs << " s)\n";
    return failures;
}
