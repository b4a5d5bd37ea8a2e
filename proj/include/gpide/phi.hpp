#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>

#include "gpide/quadrature.hpp"

namespace gpide::phi {

/// A bounded Lipschitz test function on R^3 with exact derivative bounds.
/// Every catalog entry ships analytic norms so the acceptance checks can use
/// known ||D phi||, ||D^2 phi|| rather than sampled estimates.
struct TestFunction {
    std::string name;
    std::function<double(double, double, double)> f;
    double sup_norm = 1.0;
    double lipschitz = 1.0;                ///< max over axes of the first-derivative bound
    std::array<double, 3> d1_bound{};      ///< per-axis |d/dxi|
    std::array<double, 3> d2_bound{};
    std::array<double, 3> d3_bound{};
    /// 1-D section along z at fixed (x,y), with analytic derivatives; used by
    /// the generator operations.
    std::function<quad::C3Fn(double x, double y)> z_section;
};

/// Built-in catalog.  Names: constant, cos_x, cos_z, cos_x_plus_z, cos_xyz,
/// tanh_x, tanh_y, tanh_z, tanh_prod, affine.  Parameters (e.g. the constant
/// value or affine coefficients) come from `params`; unknown names throw
/// ConfigError.
TestFunction make_test_function(const std::string& name,
                                const std::map<std::string, double>& params = {});

}  // namespace gpide::phi
