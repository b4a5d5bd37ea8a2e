#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gpide/phi.hpp"
#include "gpide/sublinear.hpp"

namespace gpide::scheme {

/// Rectangular 3-D lattice.  Spacings are derived; >= 2 points per axis.
struct Grid {
    double x_lo = -6, x_hi = 6;
    double y_lo = -1, y_hi = 1;
    double z_lo = -8, z_hi = 8;
    int nx = 49, ny = 3, nz = 33;

    void validate() const;
    double dx() const { return (x_hi - x_lo) / (nx - 1); }
    double dy() const { return (y_hi - y_lo) / (ny - 1); }
    double dz() const { return (z_hi - z_lo) / (nz - 1); }
    double x(int i) const { return x_lo + i * dx(); }
    double y(int j) const { return y_lo + j * dy(); }
    double z(int k) const { return z_lo + k * dz(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
};

/// u_h(t_k, .) sampled on the lattice; t_k represents [k h, (k+1) h).
/// Storage is dense row-major with z fastest.
struct GridFunction {
    Grid grid;
    int time_index = 0;
    std::vector<double> values;
    double sup_norm_phi = 0.0;

    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * grid.ny + iy) * grid.nz + iz;
    }
    double at(int ix, int iy, int iz) const { return values[index(ix, iy, iz)]; }

    /// Trilinear interpolation; queries outside the box clamp to the nearest
    /// boundary point (clamping cannot create new extrema).
    double interpolate(double x, double y, double z) const;
};

enum class SolveMode {
    lattice,    ///< grid-aligned kernels, candidate-major field sweeps (default)
    reference,  ///< literal sup_step + trilinear interpolation per node
};

struct SolveOptions {
    SolveMode mode = SolveMode::lattice;
    int gaussian_order = 16;
    int interior_order = 48;
    double radius = 200.0;  ///< wk rule truncation
    int q_candidates = 5;   ///< lattice-mode drift candidates
    int s2_candidates = 5;  ///< lattice-mode variance candidates
    step::ParamSearchConfig search;  ///< reference-mode (q, sigma2) search
    double boundary_tol = 1e-2;      ///< GridTooNarrow threshold
    int workers = 1;
    bool check_invariants = true;
    bool keep_history = true;  ///< keep every layer (false: first + last only)
};

struct SolveSummary {
    int n = 0;
    double h = 0.0;
    double boundary_bound = 0.0;   ///< certified boundary-influence bound at the origin
    double tail_mass_per_step = 0.0;  ///< worst corner quadrature tail
    double accumulated_tail_error = 0.0;  ///< n * 2||phi|| * tail mass
    double max_abs_value = 0.0;
    double max_lipschitz_ratio = 0.0;  ///< max over layers/axes of |du| / (C_phi dxi)
};

struct SolveResult {
    std::vector<GridFunction> history;  ///< k = 0..n (or {0, n} when history off)
    SolveSummary summary;
};

/// The recursive piecewise-constant scheme with h = 1/n.
///
/// Lattice mode realizes each one-step expectation with grid-aligned
/// quadrature rules (variance-calibrated lattice Gaussian in x, two-tap
/// drift shift in y, moment-matched lattice projection of the wk rule in z),
/// so evaluation of the previous layer is exact at the rule nodes and the
/// operator stays monotone.  Before the value recursion runs, a boundary
/// influence field is propagated through the same kernels to certify the
/// effect of edge clamping on the reported origin value; the bound exceeding
/// `boundary_tol` raises GridTooNarrow.
SolveResult solve(const phi::TestFunction& tf, const unc::UncertaintyBox& box,
                  const unc::StableParams& tail, int n, const Grid& grid,
                  const SolveOptions& opts = {});

/// The monotone scheme operator S(h,x,y,z,p,v) = (1/h)(p - E^[v(...)]).
double apply_S(const step::StepContext& ctx, const std::array<double, 3>& point, double p_value,
               const GridFunction& v);

/// u_{1/n}(1, 0, 0, 0).
double limit_functional(const phi::TestFunction& tf, const unc::UncertaintyBox& box,
                        const unc::StableParams& tail, int n, const Grid& grid,
                        const SolveOptions& opts = {});

/// Piecewise-constant-in-time evaluation: k = floor(t/h), clamped to n at
/// t = 1, then spatial trilinear interpolation.
double evaluate(const std::vector<GridFunction>& history, double t,
                const std::array<double, 3>& point);

// --- export ---------------------------------------------------------------

/// CSV layer dump, header "k,x,y,z,value", RFC-4180 line endings.
void write_csv(std::ostream& os, const GridFunction& gf);

/// Compact binary dump: 64-byte header (magic "GPIDE\0", u16 version, u16
/// axis counts, u16 time index, six f64 bounds), then the values as
/// little-endian f64, row-major with z fastest.
void write_binary(std::ostream& os, const GridFunction& gf);
GridFunction read_binary(std::istream& is);

}  // namespace gpide::scheme
