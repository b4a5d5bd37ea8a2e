#include "gpide/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gpide/errors.hpp"

namespace gpide::config {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where,
                    const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            fail(Errc::ConfigError, "config: unknown key '" + it.key() + "' in " + where);
}

double num(const json& j, const std::string& where, const char* key, double def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number())
        fail(Errc::ConfigError, "config: " + where + "." + key + " must be a number");
    return j.at(key).get<double>();
}

int integer(const json& j, const std::string& where, const char* key, int def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number_integer())
        fail(Errc::ConfigError, "config: " + where + "." + key + " must be an integer");
    return j.at(key).get<int>();
}

bool boolean(const json& j, const std::string& where, const char* key, bool def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_boolean())
        fail(Errc::ConfigError, "config: " + where + "." + key + " must be a boolean");
    return j.at(key).get<bool>();
}

std::string str(const json& j, const std::string& where, const char* key,
                const std::string& def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_string())
        fail(Errc::ConfigError, "config: " + where + "." + key + " must be a string");
    return j.at(key).get<std::string>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(Errc::ConfigError, std::string("config: JSON parse failure: ") + e.what());
    }
    if (!j.is_object()) fail(Errc::ConfigError, "config: top level must be an object");
    reject_unknown(j, "top level",
                   {"model", "scheme", "analysis", "phi", "output", "consistency"});

    ExperimentConfig cfg;

    // ---- model -----------------------------------------------------------
    if (!j.contains("model")) fail(Errc::ConfigError, "config: missing 'model' block");
    {
        const json& m = j.at("model");
        reject_unknown(m, "model",
                       {"lambda_lo", "lambda_hi", "gamma_lo", "gamma_hi", "sigma2_lo",
                        "sigma2_hi", "alpha", "a1", "a2", "beta_tail", "eps0"});
        std::map<std::string, double> raw;
        for (const char* k : {"lambda_lo", "lambda_hi", "gamma_lo", "gamma_hi", "sigma2_lo",
                              "sigma2_hi", "alpha"})
            if (m.contains(k)) raw[k] = num(m, "model", k, 0.0);
        cfg.box = unc::validate_box(raw);
        cfg.tail.alpha = cfg.box.alpha;
        cfg.tail.a1 = num(m, "model", "a1", cfg.tail.a1);
        cfg.tail.a2 = num(m, "model", "a2", cfg.tail.a2);
        cfg.tail.beta_tail = num(m, "model", "beta_tail", cfg.tail.beta_tail);
        cfg.eps0 = num(m, "model", "eps0", cfg.eps0);
        if (!(cfg.tail.beta_tail > cfg.box.alpha))
            fail(Errc::BetaOutOfRange, "config: model.beta_tail must exceed alpha");
        if (!(cfg.eps0 > 0.0)) fail(Errc::ConfigError, "config: model.eps0 must be positive");
    }

    // ---- scheme ----------------------------------------------------------
    if (j.contains("scheme")) {
        const json& s = j.at("scheme");
        reject_unknown(s, "scheme",
                       {"n_list", "grid", "mode", "gaussian_order", "interior_order", "radius",
                        "q_candidates", "s2_candidates", "coarse_q", "coarse_s2", "refine_tol",
                        "refine_sweeps", "boundary_tol", "keep_history", "check_invariants",
                        "reference"});
        if (s.contains("n_list")) {
            if (!s.at("n_list").is_array())
                fail(Errc::ConfigError, "config: scheme.n_list must be an array");
            cfg.n_list.clear();
            for (const auto& e : s.at("n_list")) {
                if (!e.is_number_integer() || e.get<int>() < 1)
                    fail(Errc::ConfigError, "config: scheme.n_list entries must be integers >= 1");
                cfg.n_list.push_back(e.get<int>());
            }
            for (std::size_t i = 1; i < cfg.n_list.size(); ++i)
                if (cfg.n_list[i] <= cfg.n_list[i - 1])
                    fail(Errc::ConfigError, "config: scheme.n_list must be strictly increasing");
            if (cfg.n_list.empty()) fail(Errc::ConfigError, "config: scheme.n_list is empty");
        }
        if (s.contains("grid")) {
            const json& g = s.at("grid");
            reject_unknown(g, "scheme.grid",
                           {"x_lo", "x_hi", "y_lo", "y_hi", "z_lo", "z_hi", "nx", "ny", "nz"});
            cfg.grid.x_lo = num(g, "grid", "x_lo", cfg.grid.x_lo);
            cfg.grid.x_hi = num(g, "grid", "x_hi", cfg.grid.x_hi);
            cfg.grid.y_lo = num(g, "grid", "y_lo", cfg.grid.y_lo);
            cfg.grid.y_hi = num(g, "grid", "y_hi", cfg.grid.y_hi);
            cfg.grid.z_lo = num(g, "grid", "z_lo", cfg.grid.z_lo);
            cfg.grid.z_hi = num(g, "grid", "z_hi", cfg.grid.z_hi);
            cfg.grid.nx = integer(g, "grid", "nx", cfg.grid.nx);
            cfg.grid.ny = integer(g, "grid", "ny", cfg.grid.ny);
            cfg.grid.nz = integer(g, "grid", "nz", cfg.grid.nz);
            cfg.grid.validate();
        }
        const std::string mode = str(s, "scheme", "mode", "lattice");
        if (mode == "lattice")
            cfg.solve.mode = scheme::SolveMode::lattice;
        else if (mode == "reference")
            cfg.solve.mode = scheme::SolveMode::reference;
        else
            fail(Errc::ConfigError, "config: scheme.mode must be 'lattice' or 'reference'");
        cfg.solve.gaussian_order = integer(s, "scheme", "gaussian_order", cfg.solve.gaussian_order);
        cfg.solve.interior_order = integer(s, "scheme", "interior_order", cfg.solve.interior_order);
        cfg.solve.radius = num(s, "scheme", "radius", cfg.solve.radius);
        cfg.solve.q_candidates = integer(s, "scheme", "q_candidates", cfg.solve.q_candidates);
        cfg.solve.s2_candidates = integer(s, "scheme", "s2_candidates", cfg.solve.s2_candidates);
        cfg.solve.search.coarse_q = integer(s, "scheme", "coarse_q", cfg.solve.search.coarse_q);
        cfg.solve.search.coarse_s2 = integer(s, "scheme", "coarse_s2", cfg.solve.search.coarse_s2);
        cfg.solve.search.refine_tol = num(s, "scheme", "refine_tol", cfg.solve.search.refine_tol);
        cfg.solve.search.refine_sweeps =
            integer(s, "scheme", "refine_sweeps", cfg.solve.search.refine_sweeps);
        cfg.solve.boundary_tol = num(s, "scheme", "boundary_tol", cfg.solve.boundary_tol);
        cfg.reference = num(s, "scheme", "reference", cfg.reference);
        cfg.solve.keep_history = boolean(s, "scheme", "keep_history", cfg.solve.keep_history);
        cfg.solve.check_invariants =
            boolean(s, "scheme", "check_invariants", cfg.solve.check_invariants);
        if (cfg.solve.gaussian_order < 2 || cfg.solve.interior_order < 2 ||
            cfg.solve.q_candidates < 1 || cfg.solve.s2_candidates < 1 ||
            cfg.solve.search.coarse_q < 2 || cfg.solve.search.coarse_s2 < 2 ||
            cfg.solve.search.refine_sweeps < 0 || !(cfg.solve.boundary_tol > 0.0))
            fail(Errc::ConfigError, "config: scheme block has out-of-range numeric settings");
    }

    // ---- analysis --------------------------------------------------------
    if (j.contains("analysis")) {
        const json& a = j.at("analysis");
        reject_unknown(a, "analysis", {"delta", "N_max", "K_zeta"});
        cfg.delta = num(a, "analysis", "delta", cfg.delta);
        cfg.N_max = integer(a, "analysis", "N_max", cfg.N_max);
        cfg.K_zeta = num(a, "analysis", "K_zeta", cfg.K_zeta);
        if (cfg.N_max < 1) fail(Errc::ConfigError, "config: analysis.N_max must be >= 1");
        if (!(cfg.K_zeta > 0.0)) fail(Errc::ConfigError, "config: analysis.K_zeta must be > 0");
    }

    // ---- phi -------------------------------------------------------------
    if (j.contains("phi")) {
        const json& p = j.at("phi");
        reject_unknown(p, "phi", {"name", "params"});
        cfg.phi_name = str(p, "phi", "name", cfg.phi_name);
        if (p.contains("params")) {
            if (!p.at("params").is_object())
                fail(Errc::ConfigError, "config: phi.params must be an object");
            for (auto it = p.at("params").begin(); it != p.at("params").end(); ++it) {
                if (!it.value().is_number())
                    fail(Errc::ConfigError, "config: phi.params values must be numbers");
                cfg.phi_params[it.key()] = it.value().get<double>();
            }
        }
    }

    // ---- output ----------------------------------------------------------
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown(o, "output", {"directory", "formats"});
        cfg.out_dir = str(o, "output", "directory", cfg.out_dir);
        if (o.contains("formats")) {
            if (!o.at("formats").is_array())
                fail(Errc::ConfigError, "config: output.formats must be an array");
            cfg.formats.clear();
            for (const auto& e : o.at("formats")) {
                if (!e.is_string())
                    fail(Errc::ConfigError, "config: output.formats entries must be strings");
                const std::string f = e.get<std::string>();
                if (f != "csv" && f != "json" && f != "binary")
                    fail(Errc::ConfigError, "config: unknown output format '" + f + "'");
                cfg.formats.push_back(f);
            }
        }
    }

    // ---- consistency -----------------------------------------------------
    if (j.contains("consistency")) {
        const json& c = j.at("consistency");
        reject_unknown(c, "consistency",
                       {"z", "p", "A", "s_exponents", "fresh_exponents", "split", "lambda_cut",
                        "panel_order", "slope_slack"});
        cfg.consistency.z = num(c, "consistency", "z", cfg.consistency.z);
        cfg.consistency.p = num(c, "consistency", "p", cfg.consistency.p);
        cfg.consistency.A = num(c, "consistency", "A", cfg.consistency.A);
        auto read_exps = [&](const char* key, std::vector<double>& dst) {
            if (!c.contains(key)) return;
            if (!c.at(key).is_array())
                fail(Errc::ConfigError, std::string("config: consistency.") + key +
                                            " must be an array");
            dst.clear();
            for (const auto& e : c.at(key)) {
                if (!e.is_number())
                    fail(Errc::ConfigError,
                         std::string("config: consistency.") + key + " entries must be numbers");
                dst.push_back(e.get<double>());
            }
        };
        read_exps("s_exponents", cfg.consistency.s_exponents);
        read_exps("fresh_exponents", cfg.consistency.fresh_exponents);
        cfg.consistency.split = num(c, "consistency", "split", cfg.consistency.split);
        cfg.consistency.lambda_cut = num(c, "consistency", "lambda_cut",
                                         cfg.consistency.lambda_cut);
        cfg.consistency.panel_order =
            integer(c, "consistency", "panel_order", cfg.consistency.panel_order);
        cfg.consistency.slope_slack =
            num(c, "consistency", "slope_slack", cfg.consistency.slope_slack);
        if (!(cfg.consistency.split > 0.0) || !(cfg.consistency.lambda_cut > 1.0) ||
            cfg.consistency.panel_order < 2)
            fail(Errc::ConfigError, "config: consistency block has out-of-range settings");
    }

    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ConfigError, "config: cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
    json j;
    j["model"] = {{"lambda_lo", cfg.box.lambda_lo}, {"lambda_hi", cfg.box.lambda_hi},
                  {"gamma_lo", cfg.box.gamma_lo},   {"gamma_hi", cfg.box.gamma_hi},
                  {"sigma2_lo", cfg.box.sigma2_lo}, {"sigma2_hi", cfg.box.sigma2_hi},
                  {"alpha", cfg.box.alpha},         {"a1", cfg.tail.a1},
                  {"a2", cfg.tail.a2},              {"beta_tail", cfg.tail.beta_tail},
                  {"eps0", cfg.eps0}};
    j["scheme"] = {
        {"n_list", cfg.n_list},
        {"grid",
         {{"x_lo", cfg.grid.x_lo},
          {"x_hi", cfg.grid.x_hi},
          {"y_lo", cfg.grid.y_lo},
          {"y_hi", cfg.grid.y_hi},
          {"z_lo", cfg.grid.z_lo},
          {"z_hi", cfg.grid.z_hi},
          {"nx", cfg.grid.nx},
          {"ny", cfg.grid.ny},
          {"nz", cfg.grid.nz}}},
        {"mode", cfg.solve.mode == scheme::SolveMode::lattice ? "lattice" : "reference"},
        {"gaussian_order", cfg.solve.gaussian_order},
        {"interior_order", cfg.solve.interior_order},
        {"radius", cfg.solve.radius},
        {"q_candidates", cfg.solve.q_candidates},
        {"s2_candidates", cfg.solve.s2_candidates},
        {"coarse_q", cfg.solve.search.coarse_q},
        {"coarse_s2", cfg.solve.search.coarse_s2},
        {"refine_tol", cfg.solve.search.refine_tol},
        {"refine_sweeps", cfg.solve.search.refine_sweeps},
        {"boundary_tol", cfg.solve.boundary_tol},
        {"keep_history", cfg.solve.keep_history},
        {"check_invariants", cfg.solve.check_invariants}};
    if (std::isfinite(cfg.reference)) j["scheme"]["reference"] = cfg.reference;
    j["analysis"] = {{"delta", cfg.delta}, {"N_max", cfg.N_max}, {"K_zeta", cfg.K_zeta}};
    j["phi"] = {{"name", cfg.phi_name}, {"params", json::object()}};
    for (const auto& [k, v] : cfg.phi_params) j["phi"]["params"][k] = v;
    j["output"] = {{"directory", cfg.out_dir}, {"formats", cfg.formats}};
    j["consistency"] = {{"z", cfg.consistency.z},
                        {"p", cfg.consistency.p},
                        {"A", cfg.consistency.A},
                        {"s_exponents", cfg.consistency.s_exponents},
                        {"fresh_exponents", cfg.consistency.fresh_exponents},
                        {"split", cfg.consistency.split},
                        {"lambda_cut", cfg.consistency.lambda_cut},
                        {"panel_order", cfg.consistency.panel_order},
                        {"slope_slack", cfg.consistency.slope_slack}};
    return j.dump(2) + "\n";
}

}  // namespace gpide::config
