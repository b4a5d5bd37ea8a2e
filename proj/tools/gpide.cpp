// gpide: batch front-end for the sublinear-expectation PIDE laboratory.
//
// Subcommands: solve | rate-study | consistency | generator-eval | report.
// One JSON config document per run; CLI flags only pick the config path,
// output directory, worker count, and a reserved --seed.  Exit codes:
// 0 ok, 2 configuration, 3 infeasible numerics, 4 check failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpide/analysis.hpp"
#include "gpide/config.hpp"
#include "gpide/errors.hpp"
#include "gpide/generator.hpp"
#include "gpide/phi.hpp"
#include "gpide/scheme.hpp"
#include "gpide/uncertainty.hpp"

namespace {

using nlohmann::json;
using namespace gpide;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;  // empty = use the config's output.directory
    int workers = 1;
    unsigned seed = 0;  // reserved; everything is deterministic
};

config::ExperimentConfig load(const CommonArgs& args) {
    config::ExperimentConfig cfg = config::load_config_file(args.config_path);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    cfg.solve.workers = std::max(1, args.workers);
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(Errc::ConfigError, "cannot write output file '" + path + "'");
    os << text;
}

json config_echo(const config::ExperimentConfig& cfg) {
    return json::parse(config::dump_config(cfg));
}

double model_q0(const config::ExperimentConfig& cfg) {
    return gen::q0_from_beta(cfg.box.alpha, cfg.tail.beta_tail, cfg.eps0);
}

// ---- solve ----------------------------------------------------------------

int cmd_solve(const CommonArgs& args) {
    const config::ExperimentConfig cfg = load(args);
    const phi::TestFunction tf = phi::make_test_function(cfg.phi_name, cfg.phi_params);
    const int n = cfg.n_list.back();

    const scheme::SolveResult res = scheme::solve(tf, cfg.box, cfg.tail, n, cfg.grid, cfg.solve);
    const scheme::GridFunction& final_layer = res.history.back();
    const double origin = scheme::evaluate(res.history, 1.0, {0.0, 0.0, 0.0});

    for (const std::string& fmt : cfg.formats) {
        if (fmt == "csv") {
            std::ostringstream csv;
            scheme::write_csv(csv, final_layer);
            write_text(cfg.out_dir + "/u_final.csv", csv.str());
        } else if (fmt == "binary") {
            std::ofstream os(cfg.out_dir + "/u_final.bin", std::ios::binary);
            if (!os) fail(Errc::ConfigError, "cannot write binary dump");
            scheme::write_binary(os, final_layer);
        }
    }

    json summary;
    summary["n"] = res.summary.n;
    summary["h"] = res.summary.h;
    summary["value_at_origin"] = origin;
    summary["boundary_bound"] = res.summary.boundary_bound;
    summary["tail_mass_per_step"] = res.summary.tail_mass_per_step;
    summary["accumulated_tail_error"] = res.summary.accumulated_tail_error;
    summary["invariants"] = {{"max_abs_value", res.summary.max_abs_value},
                             {"sup_norm_phi", tf.sup_norm},
                             {"max_lipschitz_ratio", res.summary.max_lipschitz_ratio},
                             {"bounded", res.summary.max_abs_value <=
                                             tf.sup_norm * (1.0 + 1e-9) + 1e-12},
                             {"lipschitz_ok", res.summary.max_lipschitz_ratio <= 1.0 + 1e-6}};
    summary["config"] = config_echo(cfg);
    write_text(cfg.out_dir + "/solve_summary.json", summary.dump(2) + "\n");

    std::cout << "solve: n=" << n << " u(1,0,0,0)=" << origin
              << " boundary_bound=" << res.summary.boundary_bound << "\n";
    return 0;
}

// ---- rate-study -----------------------------------------------------------

int cmd_rate_study(const CommonArgs& args) {
    const config::ExperimentConfig cfg = load(args);
    if (cfg.n_list.size() < 4)
        fail(Errc::ConfigError, "rate-study: n_list needs at least 4 entries");
    const phi::TestFunction tf = phi::make_test_function(cfg.phi_name, cfg.phi_params);

    scheme::SolveOptions opts = cfg.solve;
    opts.keep_history = false;

    const bool closed_form = std::isfinite(cfg.reference);
    std::vector<std::pair<int, double>> pairs;
    double reference = cfg.reference;
    for (int n : cfg.n_list) {
        const bool is_ref_run = !closed_form && n == cfg.n_list.back();
        const double v = scheme::limit_functional(tf, cfg.box, cfg.tail, n, cfg.grid, opts);
        if (is_ref_run)
            reference = v;
        else
            pairs.emplace_back(n, v);
        std::cout << "rate-study: n=" << n << " value=" << v << "\n";
    }

    const double q0 = model_q0(cfg);
    const double theory = analysis::rate_exponent(cfg.box.alpha, cfg.delta_or_default(), q0);
    const analysis::RateReport rep =
        analysis::fit_order(pairs, reference, theory, 1e-12, /*allow_exact=*/true);

    std::ostringstream csv;
    csv << "n,value,residual,log_residual\r\n";
    for (std::size_t i = 0; i < rep.n_values.size(); ++i) {
        const double r = std::fabs(rep.functional_values[i] - reference);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\r\n", rep.n_values[i],
                      rep.functional_values[i], r, r > 0 ? std::log(r) : -std::numeric_limits<double>::infinity());
        csv << buf;
    }
    write_text(cfg.out_dir + "/rate_study.csv", csv.str());

    json summary;
    summary["reference"] = reference;
    summary["reference_source"] = closed_form ? "closed_form" : "finest_n";
    summary["fitted_order"] = rep.exact ? json("exact") : json(rep.fitted_order);
    summary["theory_order"] = rep.theory_order;
    summary["q0"] = q0;
    summary["used_points"] = rep.used_points;
    summary["exact_case"] = rep.exact;
    summary["pass"] = rep.pass;
    summary["config"] = config_echo(cfg);
    write_text(cfg.out_dir + "/rate_study.json", summary.dump(2) + "\n");

    std::cout << "rate-study: fitted_order="
              << (rep.exact ? std::string("exact") : std::to_string(rep.fitted_order))
              << " theory_order=" << theory << " pass=" << (rep.pass ? "true" : "false") << "\n";
    return 0;
}

// ---- consistency ----------------------------------------------------------

int cmd_consistency(const CommonArgs& args) {
    const config::ExperimentConfig cfg = load(args);
    const phi::TestFunction tf = phi::make_test_function(cfg.phi_name, cfg.phi_params);
    const quad::C3Fn section = tf.z_section(0.0, 0.0);
    const config::ConsistencyConfig& cc = cfg.consistency;

    gen::GeneratorQuadrature qcfg;
    qcfg.split = cc.split;
    qcfg.lambda_cut = cc.lambda_cut;
    qcfg.panel_order = cc.panel_order;
    qcfg.interior_order = cfg.solve.interior_order;
    qcfg.tail = cfg.tail;

    const double q0 = model_q0(cfg);
    const double alpha = cfg.box.alpha;
    const double diff_exp = (2.0 - alpha) / alpha;
    const double threshold = std::min(q0, diff_exp) - cc.slope_slack;

    std::vector<double> svals, residuals;
    for (double e : cc.s_exponents) {
        const double s = std::pow(2.0, e);
        residuals.push_back(
            gen::consistency_residual(section, cc.z, s, cc.p, cc.A, cfg.box, qcfg));
        svals.push_back(s);
    }

    // l-hat shape with the section's own derivative norms; the fitted C is
    // the smallest constant making the bound dominate the sweep.
    auto shape = [&](double s) {
        return (section.norm_d1 + section.norm_d2) * std::pow(s, q0) +
               section.norm_d2 * std::pow(s, diff_exp);
    };
    double c_ab = 0.0;
    for (std::size_t i = 0; i < svals.size(); ++i) {
        const double sh = shape(svals[i]);
        if (sh > 0.0) c_ab = std::max(c_ab, residuals[i] / sh);
    }

    // Log-log slope (residual ~ C s^slope).
    bool trivial = true;
    for (double r : residuals)
        if (r > 1e-14) trivial = false;
    double slope = std::numeric_limits<double>::infinity();
    if (!trivial) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double np = static_cast<double>(svals.size());
        for (std::size_t i = 0; i < svals.size(); ++i) {
            const double lx = std::log(svals[i]);
            const double ly = std::log(std::max(residuals[i], 1e-300));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    }

    // Fresh s-set: residuals there must be dominated by the fitted bound.
    bool dominated = true;
    json fresh = json::array();
    for (double e : cc.fresh_exponents) {
        const double s = std::pow(2.0, e);
        const double r = gen::consistency_residual(section, cc.z, s, cc.p, cc.A, cfg.box, qcfg);
        const double bound = c_ab * shape(s);
        const bool ok = r <= bound * (1.0 + 1e-9) + 1e-14;
        dominated = dominated && ok;
        fresh.push_back({{"s", s}, {"residual", r}, {"lhat_bound", bound}, {"dominated", ok}});
    }

    std::ostringstream csv;
    csv << "s,residual,lhat_bound\r\n";
    for (std::size_t i = 0; i < svals.size(); ++i) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\r\n", svals[i], residuals[i],
                      c_ab * shape(svals[i]));
        csv << buf;
    }
    write_text(cfg.out_dir + "/consistency.csv", csv.str());

    const bool slope_ok = trivial || slope >= threshold;
    json summary;
    summary["z"] = cc.z;
    summary["p"] = cc.p;
    summary["A"] = cc.A;
    summary["q0"] = q0;
    summary["slope"] = trivial ? json("exact") : json(slope);
    summary["slope_threshold"] = threshold;
    summary["fitted_C_alpha_beta"] = c_ab;
    summary["fresh_set"] = fresh;
    summary["fresh_dominated"] = dominated;
    summary["trivial_zero_residuals"] = trivial;
    summary["pass"] = slope_ok && dominated;
    summary["config"] = config_echo(cfg);
    write_text(cfg.out_dir + "/consistency.json", summary.dump(2) + "\n");

    std::cout << "consistency: slope=" << (trivial ? std::string("exact") : std::to_string(slope))
              << " threshold=" << threshold << " C_ab=" << c_ab
              << " fresh_dominated=" << (dominated ? "true" : "false") << "\n";
    if (!slope_ok) {
        std::ostringstream msg;
        msg << "consistency: fitted slope " << slope << " below threshold " << threshold;
        fail(Errc::CheckFailure, msg.str());
    }
    if (!dominated)
        fail(Errc::CheckFailure, "consistency: fitted l-hat bound fails to dominate the fresh s-set");
    return 0;
}

// ---- generator-eval -------------------------------------------------------

int cmd_generator_eval(const CommonArgs& args) {
    const config::ExperimentConfig cfg = load(args);
    const phi::TestFunction tf = phi::make_test_function(cfg.phi_name, cfg.phi_params);
    const config::ConsistencyConfig& cc = cfg.consistency;

    gen::GeneratorQuadrature qcfg;
    qcfg.split = cc.split;
    qcfg.lambda_cut = cc.lambda_cut;
    qcfg.panel_order = cc.panel_order;
    qcfg.interior_order = cfg.solve.interior_order;
    qcfg.tail = cfg.tail;

    gen::GeneratorInput inp;
    inp.p = cc.p;
    inp.A = cc.A;
    inp.phi = tf.z_section(0.0, 0.0);
    inp.z = cc.z;

    const double G = gen::eval_G(inp, cfg.box, qcfg);
    const double drift = std::max(cfg.box.gamma_lo * cc.p, cfg.box.gamma_hi * cc.p);
    const double diff = 0.5 * std::max(cfg.box.sigma2_lo * cc.A, cfg.box.sigma2_hi * cc.A);

    json out;
    out["G"] = G;
    out["jump_part"] = G - drift - diff;
    out["drift_part"] = drift;
    out["diffusion_part"] = diff;
    out["p"] = cc.p;
    out["A"] = cc.A;
    out["z"] = cc.z;
    out["config"] = config_echo(cfg);
    write_text(cfg.out_dir + "/generator_eval.json", out.dump(2) + "\n");
    std::cout << "generator-eval: G=" << G << " (jump=" << G - drift - diff << ", drift=" << drift
              << ", diffusion=" << diff << ")\n";
    return 0;
}

// ---- report ---------------------------------------------------------------

int cmd_report(const CommonArgs& args) {
    const config::ExperimentConfig cfg = load(args);
    const phi::TestFunction tf = phi::make_test_function(cfg.phi_name, cfg.phi_params);
    const double delta = cfg.delta_or_default();
    const analysis::MomentSet m =
        analysis::compute_moments(cfg.box, cfg.tail, delta, cfg.N_max, tf.lipschitz);
    const double q0 = model_q0(cfg);

    analysis::LhatTerms lhat;
    lhat.C_alpha_beta = 1.0;
    lhat.q0 = q0;
    lhat.norm_d1 = tf.lipschitz;
    lhat.norm_d2 = std::max({tf.d2_bound[0], tf.d2_bound[1], tf.d2_bound[2]});
    lhat.alpha = cfg.box.alpha;

    const double h = 1.0 / cfg.n_list.back();
    const double gamma = analysis::rate_exponent(cfg.box.alpha, delta, q0);
    const analysis::ErrorBudget budget =
        analysis::error_budget(std::pow(h, gamma), h, m, cfg.K_zeta, lhat);

    json out;
    out["moments"] = {{"M_X2", m.M_X2},
                      {"M_X3", m.M_X3},
                      {"M_Y1", m.M_Y1},
                      {"M_Y2", m.M_Y2},
                      {"M_Zdelta", m.M_Zdelta},
                      {"M_Z1", m.M_Z1},
                      {"delta", m.delta},
                      {"M_Z_proxy", m.M_Z_proxy},
                      {"M_Z_proxy_is_lower_bound", true},
                      {"C0", m.C0},
                      {"M0", m.M0}};
    out["q0"] = q0;
    out["gamma"] = gamma;
    out["K_zeta"] = cfg.K_zeta;
    out["budget_at_h_min"] = {{"h", h},
                              {"eps", budget.eps},
                              {"E1", budget.E1},
                              {"E2", budget.E2},
                              {"total_min", budget.total_min},
                              {"eps_star", budget.eps_star}};
    out["config"] = config_echo(cfg);
    write_text(cfg.out_dir + "/report.json", out.dump(2) + "\n");

    std::cout << "report: gamma=" << gamma << " q0=" << q0 << " C0=" << m.C0 << " M0=" << m.M0
              << " (M_Z proxy is a lower bound; C0 may be undersized)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gpide: solver and verification laboratory for the sublinear-expectation PIDE"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON experiment config")->required();
        sub->add_option("--out", args.out_dir, "output directory (overrides config)");
        sub->add_option("--workers", args.workers, "worker threads for solver sweeps");
        sub->add_option("--seed", args.seed, "reserved; everything is deterministic");
    };

    CLI::App* solve = app.add_subcommand("solve", "run the scheme for the largest configured n");
    CLI::App* rate = app.add_subcommand("rate-study", "empirical convergence order study");
    CLI::App* cons = app.add_subcommand("consistency", "consistency residual sweep");
    CLI::App* geval = app.add_subcommand("generator-eval", "evaluate the generator G");
    CLI::App* report = app.add_subcommand("report", "moment constants and error budgets");
    for (CLI::App* sub : {solve, rate, cons, geval, report}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(args);
        if (rate->parsed()) return cmd_rate_study(args);
        if (cons->parsed()) return cmd_consistency(args);
        if (geval->parsed()) return cmd_generator_eval(args);
        if (report->parsed()) return cmd_report(args);
    } catch (const gpide::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
