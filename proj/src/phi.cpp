#include "gpide/phi.hpp"

#include <cmath>

#include "gpide/errors.hpp"

namespace gpide::phi {

namespace {

// Exact bounds for tanh: |tanh'| <= 1, |tanh''| <= 4/(3*sqrt(3)), |tanh'''| <= 2.
constexpr double kTanhD2 = 0.769800358919501;
constexpr double kTanhD3 = 2.0;

quad::C3Fn constant_section(double c) {
    return quad::C3Fn{[c](double) { return c; }, [](double) { return 0.0; },
                      [](double) { return 0.0; }, std::fabs(c), 0.0, 0.0, 0.0};
}

}  // namespace

TestFunction make_test_function(const std::string& name,
                                const std::map<std::string, double>& params) {
    auto param = [&](const std::string& key, double def) {
        auto it = params.find(key);
        return it == params.end() ? def : it->second;
    };

    TestFunction tf;
    tf.name = name;

    if (name == "constant") {
        const double c = param("value", 1.0);
        tf.f = [c](double, double, double) { return c; };
        tf.sup_norm = std::fabs(c);
        tf.lipschitz = 0.0;
        tf.z_section = [c](double, double) { return constant_section(c); };
        return tf;
    }
    if (name == "cos_x") {
        tf.f = [](double x, double, double) { return std::cos(x); };
        tf.sup_norm = 1.0;
        tf.lipschitz = 1.0;
        tf.d1_bound = {1, 0, 0};
        tf.d2_bound = {1, 0, 0};
        tf.d3_bound = {1, 0, 0};
        tf.z_section = [](double x, double) { return constant_section(std::cos(x)); };
        return tf;
    }
    if (name == "cos_z") {
        tf.f = [](double, double, double z) { return std::cos(z); };
        tf.sup_norm = 1.0;
        tf.lipschitz = 1.0;
        tf.d1_bound = {0, 0, 1};
        tf.d2_bound = {0, 0, 1};
        tf.d3_bound = {0, 0, 1};
        tf.z_section = [](double, double) {
            return quad::C3Fn{[](double z) { return std::cos(z); },
                              [](double z) { return -std::sin(z); },
                              [](double z) { return -std::cos(z); }, 1.0, 1.0, 1.0, 1.0};
        };
        return tf;
    }
    if (name == "cos_x_plus_z") {
        tf.f = [](double x, double, double z) { return std::cos(x + z); };
        tf.sup_norm = 1.0;
        tf.lipschitz = 1.0;
        tf.d1_bound = {1, 0, 1};
        tf.d2_bound = {1, 0, 1};
        tf.d3_bound = {1, 0, 1};
        tf.z_section = [](double x, double) {
            return quad::C3Fn{[x](double z) { return std::cos(x + z); },
                              [x](double z) { return -std::sin(x + z); },
                              [x](double z) { return -std::cos(x + z); }, 1.0, 1.0, 1.0, 1.0};
        };
        return tf;
    }
    if (name == "cos_xyz") {
        tf.f = [](double x, double y, double z) { return std::cos(x + y + z); };
        tf.sup_norm = 1.0;
        tf.lipschitz = 1.0;
        tf.d1_bound = {1, 1, 1};
        tf.d2_bound = {1, 1, 1};
        tf.d3_bound = {1, 1, 1};
        tf.z_section = [](double x, double y) {
            const double o = x + y;
            return quad::C3Fn{[o](double z) { return std::cos(o + z); },
                              [o](double z) { return -std::sin(o + z); },
                              [o](double z) { return -std::cos(o + z); }, 1.0, 1.0, 1.0, 1.0};
        };
        return tf;
    }
    if (name == "tanh_x" || name == "tanh_y" || name == "tanh_z") {
        const int axis = name == "tanh_x" ? 0 : name == "tanh_y" ? 1 : 2;
        tf.f = [axis](double x, double y, double z) {
            return std::tanh(axis == 0 ? x : axis == 1 ? y : z);
        };
        tf.sup_norm = 1.0;
        tf.lipschitz = 1.0;
        tf.d1_bound[axis] = 1.0;
        tf.d2_bound[axis] = kTanhD2;
        tf.d3_bound[axis] = kTanhD3;
        if (axis == 2) {
            tf.z_section = [](double, double) {
                return quad::C3Fn{[](double z) { return std::tanh(z); },
                                  [](double z) {
                                      const double t = std::tanh(z);
                                      return 1.0 - t * t;
                                  },
                                  [](double z) {
                                      const double t = std::tanh(z);
                                      return -2.0 * t * (1.0 - t * t);
                                  },
                                  1.0, 1.0, kTanhD2, kTanhD3};
            };
        } else {
            tf.z_section = [axis, tf_f = tf.f](double x, double y) {
                return constant_section(tf_f(x, y, 0.0));
            };
        }
        return tf;
    }
    if (name == "tanh_prod") {
        tf.f = [](double x, double y, double z) {
            return std::tanh(x) * std::tanh(y) * std::tanh(z);
        };
        tf.sup_norm = 1.0;
        tf.lipschitz = 1.0;
        tf.d1_bound = {1, 1, 1};
        tf.d2_bound = {kTanhD2, kTanhD2, kTanhD2};
        tf.d3_bound = {kTanhD3, kTanhD3, kTanhD3};
        tf.z_section = [](double x, double y) {
            const double c = std::tanh(x) * std::tanh(y);
            const double ac = std::fabs(c);
            return quad::C3Fn{[c](double z) { return c * std::tanh(z); },
                              [c](double z) {
                                  const double t = std::tanh(z);
                                  return c * (1.0 - t * t);
                              },
                              [c](double z) {
                                  const double t = std::tanh(z);
                                  return -2.0 * c * t * (1.0 - t * t);
                              },
                              ac, ac, ac * kTanhD2, ac * kTanhD3};
        };
        return tf;
    }
    if (name == "affine") {
        // a0 + ax x + ay y + az z.  Unbounded on R^3; the recorded norms are
        // taken over the configured working box |x|,|y|,|z| <= box_radius.
        const double a0 = param("a0", 0.0), ax = param("ax", 0.0), ay = param("ay", 0.0),
                     az = param("az", 0.0);
        const double B = param("box_radius", 16.0);
        tf.f = [a0, ax, ay, az](double x, double y, double z) {
            return a0 + ax * x + ay * y + az * z;
        };
        tf.sup_norm = std::fabs(a0) + (std::fabs(ax) + std::fabs(ay) + std::fabs(az)) * B;
        tf.d1_bound = {std::fabs(ax), std::fabs(ay), std::fabs(az)};
        tf.lipschitz = std::max({std::fabs(ax), std::fabs(ay), std::fabs(az)});
        tf.z_section = [a0, ax, ay, az, sup = tf.sup_norm](double x, double y) {
            const double base = a0 + ax * x + ay * y;
            return quad::C3Fn{[base, az](double z) { return base + az * z; },
                              [az](double) { return az; }, [](double) { return 0.0; }, sup,
                              std::fabs(az), 0.0, 0.0};
        };
        return tf;
    }
    fail(Errc::ConfigError, "unknown test function: " + name);
}

}  // namespace gpide::phi
