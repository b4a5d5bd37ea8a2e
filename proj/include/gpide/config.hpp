#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gpide/analysis.hpp"
#include "gpide/scheme.hpp"
#include "gpide/uncertainty.hpp"

namespace gpide::config {

/// Parameters of the consistency sweep (generator-side experiments).
struct ConsistencyConfig {
    double z = 0.0;
    double p = 1.0;
    double A = 1.0;
    std::vector<double> s_exponents{-4, -5, -6, -7, -8, -9, -10, -11, -12};  ///< s = 2^e
    std::vector<double> fresh_exponents{-4.5, -6.5, -9.5, -11.5};
    double split = 1e-3;
    double lambda_cut = 1e4;
    int panel_order = 16;
    double slope_slack = 0.05;  ///< pass needs slope >= min(q0,(2-a)/a) - slack
};

/// One experiment, one JSON document.  Unknown keys anywhere are rejected.
struct ExperimentConfig {
    // model block
    unc::UncertaintyBox box;
    unc::StableParams tail;  ///< a1, a2, beta_tail (k1,k2 filled per corner)
    double eps0 = 0.01;

    // scheme block
    std::vector<int> n_list{8, 16, 32, 64};
    scheme::Grid grid;
    scheme::SolveOptions solve;
    /// Optional closed-form reference for rate studies (NaN = use the
    /// finest-n run as reference).
    double reference = std::numeric_limits<double>::quiet_NaN();

    // analysis block
    double delta = 0.0;  ///< 0 = use default_delta(alpha)
    int N_max = 32;
    double K_zeta = analysis::kKZetaDefault;

    // phi block
    std::string phi_name = "cos_x";
    std::map<std::string, double> phi_params;

    // output block
    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};

    ConsistencyConfig consistency;

    double delta_or_default() const {
        return delta > 0.0 ? delta : analysis::default_delta(box.alpha);
    }
};

/// Parse + validate a JSON document.  Every violation is reported through
/// the module validators; unknown keys raise ConfigError.
ExperimentConfig parse_config(const std::string& json_text);

/// Load from a file path (ConfigError when unreadable).
ExperimentConfig load_config_file(const std::string& path);

/// Normalized JSON echo: parse(dump(parse(text))) == parse(text).
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace gpide::config
