#include "gpide/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "gpide/errors.hpp"
#include "gpide/reduce.hpp"
#include "gpide/simd.hpp"

namespace gpide::scheme {

void Grid::validate() const {
    if (!(x_hi > x_lo && y_hi > y_lo && z_hi > z_lo))
        fail(Errc::ConfigError, "Grid: upper bounds must exceed lower bounds");
    if (nx < 2 || ny < 2 || nz < 2)
        fail(Errc::ConfigError, "Grid: every axis needs at least 2 points");
}

double GridFunction::interpolate(double x, double y, double z) const {
    const Grid& g = grid;
    auto locate = [](double v, double lo, double d, int n) {
        double t = (v - lo) / d;
        int i = static_cast<int>(std::floor(t));
        i = std::clamp(i, 0, n - 2);
        double f = std::clamp(t - i, 0.0, 1.0);
        return std::pair<int, double>{i, f};
    };
    auto [ix, fx] = locate(x, g.x_lo, g.dx(), g.nx);
    auto [iy, fy] = locate(y, g.y_lo, g.dy(), g.ny);
    auto [iz, fz] = locate(z, g.z_lo, g.dz(), g.nz);

    double acc = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const double w = (a ? fx : 1 - fx) * (b ? fy : 1 - fy) * (c ? fz : 1 - fz);
                if (w != 0.0) acc += w * at(ix + a, iy + b, iz + c);
            }
    return acc;
}

namespace {

// ---- parallel slab helper -------------------------------------------------

/// Static contiguous partition over [0, count) x-slices.  Every element is
/// written by exactly one thread with a fixed per-element operation order, so
/// results are bitwise independent of the worker count.
template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const int lo = count * w / workers;
        const int hi = count * (w + 1) / workers;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

struct Dims {
    int nx, ny, nz;
    std::size_t plane() const { return static_cast<std::size_t>(ny) * nz; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * plane(); }
};

// ---- per-axis kernel application (edge reads clamp to the boundary) -------

void apply_axis_z(const double* src, double* dst, const Dims& d, const quad::LatticeKernel& k,
                  int x0, int x1) {
    for (int ix = x0; ix < x1; ++ix)
        for (int iy = 0; iy < d.ny; ++iy) {
            const double* s = src + (static_cast<std::size_t>(ix) * d.ny + iy) * d.nz;
            double* o = dst + (static_cast<std::size_t>(ix) * d.ny + iy) * d.nz;
            std::fill(o, o + d.nz, 0.0);
            for (std::size_t t = 0; t < k.offsets.size(); ++t) {
                const int off = k.offsets[t];
                const double w = k.weights[t];
                const int lo = std::clamp(-off, 0, d.nz);
                const int hi = std::clamp(d.nz - off, 0, d.nz);
                if (lo > 0) simd::add_constant(o, static_cast<std::size_t>(lo), w * s[0]);
                if (hi > lo) simd::axpy(o + lo, s + lo + off, static_cast<std::size_t>(hi - lo), w);
                if (hi < d.nz)
                    simd::add_constant(o + hi, static_cast<std::size_t>(d.nz - hi),
                                       w * s[d.nz - 1]);
            }
        }
}

void apply_axis_y(const double* src, double* dst, const Dims& d, const quad::LatticeKernel& k,
                  int x0, int x1) {
    for (int ix = x0; ix < x1; ++ix)
        for (int iy = 0; iy < d.ny; ++iy) {
            double* o = dst + (static_cast<std::size_t>(ix) * d.ny + iy) * d.nz;
            std::fill(o, o + d.nz, 0.0);
            for (std::size_t t = 0; t < k.offsets.size(); ++t) {
                const int jy = std::clamp(iy + k.offsets[t], 0, d.ny - 1);
                const double* s = src + (static_cast<std::size_t>(ix) * d.ny + jy) * d.nz;
                simd::axpy(o, s, static_cast<std::size_t>(d.nz), k.weights[t]);
            }
        }
}

void apply_axis_x(const double* src, double* dst, const Dims& d, const quad::LatticeKernel& k,
                  int x0, int x1) {
    const std::size_t plane = d.plane();
    for (int ix = x0; ix < x1; ++ix) {
        double* o = dst + static_cast<std::size_t>(ix) * plane;
        std::fill(o, o + plane, 0.0);
        for (std::size_t t = 0; t < k.offsets.size(); ++t) {
            const int jx = std::clamp(ix + k.offsets[t], 0, d.nx - 1);
            simd::axpy(o, src + static_cast<std::size_t>(jx) * plane, plane, k.weights[t]);
        }
    }
}

// ---- lattice realization of one scheme step -------------------------------

struct StepKernels {
    std::array<quad::LatticeKernel, 4> z;  ///< per (k1,k2) corner
    std::vector<quad::LatticeKernel> y;    ///< per drift candidate
    std::vector<quad::LatticeKernel> x;    ///< per variance candidate
};

/// Per-node clamp residuals of one axis kernel: the weight that falls on a
/// clamped read times the worst value discrepancy such a read can hide,
/// min(2||phi||, C_axis * overshoot distance).
std::vector<double> clamp_profile(const quad::LatticeKernel& k, int npts, double spacing,
                                  double c_axis, double two_norm) {
    std::vector<double> r(static_cast<std::size_t>(npts), 0.0);
    for (int i = 0; i < npts; ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t < k.offsets.size(); ++t) {
            const int j = i + k.offsets[t];
            double dist = 0.0;
            if (j < 0)
                dist = -static_cast<double>(j) * spacing;
            else if (j >= npts)
                dist = static_cast<double>(j - (npts - 1)) * spacing;
            else
                continue;
            acc += k.weights[t] * std::min(two_norm, c_axis * dist);
        }
        r[static_cast<std::size_t>(i)] = acc;
    }
    return r;
}

struct ClampProfiles {
    std::array<std::vector<double>, 4> z;
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> x;
};

/// One candidate-major sweep out = max over (corner, q, sigma2) of
/// Kx(Ky(Kz(src)+rz)+ry)+rx.  Partial transforms are shared across the inner
/// loops.  When `prof` is non-null the clamp-residual profiles are added
/// after every axis, which turns the value sweep into the boundary-influence
/// recursion on an error field.
void candidate_sweep(const double* src, double* out, const Dims& d, const StepKernels& K,
                     const ClampProfiles* prof, double* bz, double* bzy, double* bcand,
                     int workers) {
    bool first = true;
    for (int c = 0; c < 4; ++c) {
        parallel_for(d.nx, workers, [&](int x0, int x1) {
            apply_axis_z(src, bz, d, K.z[static_cast<std::size_t>(c)], x0, x1);
            if (prof) {
                const std::vector<double>& rz = prof->z[static_cast<std::size_t>(c)];
                for (int ix = x0; ix < x1; ++ix)
                    for (int iy = 0; iy < d.ny; ++iy)
                        simd::axpy(bz + (static_cast<std::size_t>(ix) * d.ny + iy) * d.nz,
                                   rz.data(), static_cast<std::size_t>(d.nz), 1.0);
            }
        });
        for (std::size_t qi = 0; qi < K.y.size(); ++qi) {
            parallel_for(d.nx, workers, [&](int x0, int x1) {
                apply_axis_y(bz, bzy, d, K.y[qi], x0, x1);
                if (prof) {
                    const std::vector<double>& ry = prof->y[qi];
                    for (int ix = x0; ix < x1; ++ix)
                        for (int iy = 0; iy < d.ny; ++iy)
                            simd::add_constant(
                                bzy + (static_cast<std::size_t>(ix) * d.ny + iy) * d.nz,
                                static_cast<std::size_t>(d.nz), ry[static_cast<std::size_t>(iy)]);
                }
            });
            for (std::size_t si = 0; si < K.x.size(); ++si) {
                const bool f = first;
                parallel_for(d.nx, workers, [&](int x0, int x1) {
                    apply_axis_x(bzy, bcand, d, K.x[si], x0, x1);
                    const std::size_t plane = d.plane();
                    for (int ix = x0; ix < x1; ++ix) {
                        double* cand = bcand + static_cast<std::size_t>(ix) * plane;
                        if (prof)
                            simd::add_constant(cand, plane,
                                               prof->x[si][static_cast<std::size_t>(ix)]);
                        double* o = out + static_cast<std::size_t>(ix) * plane;
                        if (f)
                            std::copy(cand, cand + plane, o);
                        else
                            simd::max_inplace(o, cand, plane);
                    }
                });
                first = false;
            }
        }
    }
}

quad::LatticeKernel identity_kernel() {
    quad::LatticeKernel k;
    k.offsets = {0};
    k.weights = {1.0};
    return k;
}

quad::LatticeKernel shift_kernel(double displacement, double spacing) {
    const double t = displacement / spacing;
    const int i0 = static_cast<int>(std::floor(t));
    const double f = t - i0;
    quad::LatticeKernel k;
    k.offsets = {i0, i0 + 1};
    k.weights = {1.0 - f, f};
    return k;
}

std::vector<double> linspace_candidates(double lo, double hi, int count) {
    if (!(hi > lo)) return {lo};
    count = std::max(2, count);
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return v;
}

}  // namespace

double apply_S(const step::StepContext& ctx, const std::array<double, 3>& point, double p_value,
               const GridFunction& v) {
    step::Field3 field = [&v](double x, double y, double z) { return v.interpolate(x, y, z); };
    return (p_value - step::sup_step(ctx, field, point).value) / ctx.h;
}

SolveResult solve(const phi::TestFunction& tf, const unc::UncertaintyBox& box,
                  const unc::StableParams& tail, int n, const Grid& grid,
                  const SolveOptions& opts) {
    grid.validate();
    if (n < 1) fail(Errc::ConfigError, "solve: n must be >= 1");
    const double h = 1.0 / n;

    const step::StepContext ctx = step::make_step_context(
        h, box, tail, opts.gaussian_order, opts.interior_order, opts.radius, opts.search);

    const Dims d{grid.nx, grid.ny, grid.nz};
    const double zscale = std::pow(h, 1.0 / box.alpha);

    // Grid-aligned kernels.  Used directly by the lattice solve; in reference
    // mode they still drive the boundary-influence certification, which then
    // bounds the clamp effect of the matching lattice realization.
    StepKernels K;
    for (int c = 0; c < 4; ++c)
        K.z[static_cast<std::size_t>(c)] =
            quad::lattice_project_kernel(ctx.wk[static_cast<std::size_t>(c)], zscale, grid.dz());
    const std::vector<double> q_cands =
        linspace_candidates(box.gamma_lo, box.gamma_hi, opts.q_candidates);
    const std::vector<double> s2_cands =
        linspace_candidates(box.sigma2_lo, box.sigma2_hi, opts.s2_candidates);
    for (double q : q_cands)
        K.y.push_back(q == 0.0 ? identity_kernel() : shift_kernel(h * q, grid.dy()));
    for (double s2 : s2_cands)
        K.x.push_back(h * s2 > 0.0 ? quad::lattice_gaussian_kernel(h * s2, grid.dx())
                                   : identity_kernel());

    const double two_norm = 2.0 * tf.sup_norm;
    double tail_mass = 0.0;
    for (const auto& rule : ctx.wk) tail_mass = std::max(tail_mass, rule.tail_remainder);
    const double tail_per_step = two_norm * tail_mass;

    // ---- boundary-influence precheck -------------------------------------
    ClampProfiles prof;
    for (int c = 0; c < 4; ++c)
        prof.z[static_cast<std::size_t>(c)] = clamp_profile(
            K.z[static_cast<std::size_t>(c)], grid.nz, grid.dz(), tf.d1_bound[2], two_norm);
    for (const auto& ky : K.y)
        prof.y.push_back(clamp_profile(ky, grid.ny, grid.dy(), tf.d1_bound[1], two_norm));
    for (const auto& kx : K.x)
        prof.x.push_back(clamp_profile(kx, grid.nx, grid.dx(), tf.d1_bound[0], two_norm));

    std::vector<double> bz(d.size()), bzy(d.size()), bcand(d.size());
    std::vector<double> dcur(d.size(), 0.0), dnext(d.size());
    for (int k = 0; k < n; ++k) {
        candidate_sweep(dcur.data(), dnext.data(), d, K, &prof, bz.data(), bzy.data(),
                        bcand.data(), opts.workers);
        dcur.swap(dnext);
    }
    GridFunction dfield;
    dfield.grid = grid;
    dfield.values = std::move(dcur);
    // Conservative origin read: maximum over the corners of the cell that
    // contains the origin rather than the interpolated value.
    double origin_influence = 0.0;
    {
        auto cell = [](double v, double lo, double dd, int np) {
            int i = static_cast<int>(std::floor((v - lo) / dd));
            return std::clamp(i, 0, np - 2);
        };
        const int ix = cell(0.0, grid.x_lo, grid.dx(), grid.nx);
        const int iy = cell(0.0, grid.y_lo, grid.dy(), grid.ny);
        const int iz = cell(0.0, grid.z_lo, grid.dz(), grid.nz);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    origin_influence =
                        std::max(origin_influence, dfield.at(ix + a, iy + b, iz + c));
    }

    SolveSummary summary;
    summary.n = n;
    summary.h = h;
    summary.tail_mass_per_step = tail_mass;
    summary.accumulated_tail_error = n * tail_per_step;
    summary.boundary_bound = origin_influence + summary.accumulated_tail_error;
    if (summary.boundary_bound > opts.boundary_tol) {
        std::ostringstream msg;
        msg << "solve: boundary influence bound " << summary.boundary_bound
            << " exceeds tolerance " << opts.boundary_tol
            << " (clamp influence " << origin_influence << ", accumulated quadrature tail "
            << summary.accumulated_tail_error << "); widen the grid or raise boundary_tol";
        fail(Errc::GridTooNarrow, msg.str());
    }

    // ---- value recursion --------------------------------------------------
    GridFunction u0;
    u0.grid = grid;
    u0.time_index = 0;
    u0.sup_norm_phi = tf.sup_norm;
    u0.values.resize(d.size());
    for (int ix = 0; ix < grid.nx; ++ix)
        for (int iy = 0; iy < grid.ny; ++iy)
            for (int iz = 0; iz < grid.nz; ++iz)
                u0.values[u0.index(ix, iy, iz)] = tf.f(grid.x(ix), grid.y(iy), grid.z(iz));

    auto check_layer = [&](const GridFunction& gf, SolveSummary& sum) {
        double mx = 0.0;
        for (double v : gf.values) mx = std::max(mx, std::fabs(v));
        sum.max_abs_value = std::max(sum.max_abs_value, mx);
        if (opts.check_invariants && mx > tf.sup_norm * (1.0 + 1e-9) + 1e-12) {
            std::ostringstream msg;
            msg << "solve: boundedness invariant violated: max |u| = " << mx << " > ||phi|| = "
                << tf.sup_norm;
            fail(Errc::CheckFailure, msg.str());
        }
        const std::array<double, 3> spacing{grid.dx(), grid.dy(), grid.dz()};
        for (int axis = 0; axis < 3; ++axis) {
            double md = 0.0;
            for (int ix = 0; ix < grid.nx; ++ix)
                for (int iy = 0; iy < grid.ny; ++iy)
                    for (int iz = 0; iz < grid.nz; ++iz) {
                        if ((axis == 0 && ix + 1 == grid.nx) || (axis == 1 && iy + 1 == grid.ny) ||
                            (axis == 2 && iz + 1 == grid.nz))
                            continue;
                        const double a = gf.at(ix, iy, iz);
                        const double b = gf.at(ix + (axis == 0), iy + (axis == 1),
                                               iz + (axis == 2));
                        md = std::max(md, std::fabs(b - a));
                    }
            const double cap = tf.d1_bound[static_cast<std::size_t>(axis)] *
                               spacing[static_cast<std::size_t>(axis)];
            if (cap > 0.0) sum.max_lipschitz_ratio = std::max(sum.max_lipschitz_ratio, md / cap);
            if (opts.check_invariants && md > cap * (1.0 + 1e-6) + 1e-9) {
                std::ostringstream msg;
                msg << "solve: Lipschitz invariant violated on axis " << axis << ": max |du| = "
                    << md << " > bound " << cap;
                fail(Errc::CheckFailure, msg.str());
            }
        }
    };

    SolveResult result;
    result.summary = summary;
    check_layer(u0, result.summary);
    result.history.push_back(std::move(u0));

    std::vector<double> cur = result.history.front().values;
    std::vector<double> next(d.size());
    for (int k = 1; k <= n; ++k) {
        if (opts.mode == SolveMode::lattice) {
            candidate_sweep(cur.data(), next.data(), d, K, nullptr, bz.data(), bzy.data(),
                            bcand.data(), opts.workers);
        } else {
            GridFunction prev;
            prev.grid = grid;
            prev.values = cur;
            step::Field3 field = [&prev](double x, double y, double z) {
                return prev.interpolate(x, y, z);
            };
            parallel_for(grid.nx, opts.workers, [&](int x0, int x1) {
                for (int ix = x0; ix < x1; ++ix)
                    for (int iy = 0; iy < grid.ny; ++iy)
                        for (int iz = 0; iz < grid.nz; ++iz) {
                            const std::array<double, 3> pt{grid.x(ix), grid.y(iy), grid.z(iz)};
                            next[(static_cast<std::size_t>(ix) * grid.ny + iy) * grid.nz + iz] =
                                step::sup_step(ctx, field, pt).value;
                        }
            });
        }
        cur.swap(next);

        GridFunction layer;
        layer.grid = grid;
        layer.time_index = k;
        layer.sup_norm_phi = tf.sup_norm;
        layer.values = cur;
        check_layer(layer, result.summary);
        if (opts.keep_history || k == n)
            result.history.push_back(std::move(layer));
    }
    return result;
}

double limit_functional(const phi::TestFunction& tf, const unc::UncertaintyBox& box,
                        const unc::StableParams& tail, int n, const Grid& grid,
                        const SolveOptions& opts) {
    const SolveResult res = solve(tf, box, tail, n, grid, opts);
    return evaluate(res.history, 1.0, {0.0, 0.0, 0.0});
}

double evaluate(const std::vector<GridFunction>& history, double t,
                const std::array<double, 3>& point) {
    if (history.empty()) fail(Errc::ConfigError, "evaluate: empty history");
    if (!(t >= 0.0 && t <= 1.0)) fail(Errc::ConfigError, "evaluate: t must lie in [0,1]");
    const int n = history.back().time_index;
    const int k = std::min(n, static_cast<int>(std::floor(t * n)));
    for (const GridFunction& gf : history)
        if (gf.time_index == k) return gf.interpolate(point[0], point[1], point[2]);
    fail(Errc::ConfigError, "evaluate: requested time layer not stored (history disabled?)");
}

// ---- export ---------------------------------------------------------------

void write_csv(std::ostream& os, const GridFunction& gf) {
    os << "k,x,y,z,value\r\n";
    char buf[160];
    const Grid& g = gf.grid;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int iz = 0; iz < g.nz; ++iz) {
                std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\r\n", gf.time_index,
                              g.x(ix), g.y(iy), g.z(iz), gf.at(ix, iy, iz));
                os << buf;
            }
}

namespace {
constexpr char kMagic[6] = {'G', 'P', 'I', 'D', 'E', '\0'};
constexpr std::uint16_t kVersion = 1;
}  // namespace

void write_binary(std::ostream& os, const GridFunction& gf) {
    char header[64] = {};
    std::memcpy(header, kMagic, 6);
    auto put_u16 = [&](int at, std::uint16_t v) { std::memcpy(header + at, &v, 2); };
    put_u16(6, kVersion);
    put_u16(8, static_cast<std::uint16_t>(gf.grid.nx));
    put_u16(10, static_cast<std::uint16_t>(gf.grid.ny));
    put_u16(12, static_cast<std::uint16_t>(gf.grid.nz));
    put_u16(14, static_cast<std::uint16_t>(gf.time_index));
    const double bounds[6] = {gf.grid.x_lo, gf.grid.x_hi, gf.grid.y_lo,
                              gf.grid.y_hi, gf.grid.z_lo, gf.grid.z_hi};
    std::memcpy(header + 16, bounds, sizeof bounds);
    os.write(header, sizeof header);
    os.write(reinterpret_cast<const char*>(gf.values.data()),
             static_cast<std::streamsize>(gf.values.size() * sizeof(double)));
}

GridFunction read_binary(std::istream& is) {
    char header[64];
    is.read(header, sizeof header);
    if (!is || std::memcmp(header, kMagic, 6) != 0)
        fail(Errc::ConfigError, "read_binary: bad magic or truncated header");
    auto get_u16 = [&](int at) {
        std::uint16_t v;
        std::memcpy(&v, header + at, 2);
        return v;
    };
    if (get_u16(6) != kVersion) fail(Errc::ConfigError, "read_binary: unsupported version");
    GridFunction gf;
    gf.grid.nx = get_u16(8);
    gf.grid.ny = get_u16(10);
    gf.grid.nz = get_u16(12);
    gf.time_index = get_u16(14);
    double bounds[6];
    std::memcpy(bounds, header + 16, sizeof bounds);
    gf.grid.x_lo = bounds[0];
    gf.grid.x_hi = bounds[1];
    gf.grid.y_lo = bounds[2];
    gf.grid.y_hi = bounds[3];
    gf.grid.z_lo = bounds[4];
    gf.grid.z_hi = bounds[5];
    gf.grid.validate();
    gf.values.resize(gf.grid.size());
    is.read(reinterpret_cast<char*>(gf.values.data()),
            static_cast<std::streamsize>(gf.values.size() * sizeof(double)));
    if (!is) fail(Errc::ConfigError, "read_binary: truncated payload");
    return gf;
}

}  // namespace gpide::scheme
