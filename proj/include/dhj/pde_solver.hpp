#pragma once

#include "dhj/exponents.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dhj {

enum class GeometryKind { Line, Radial };

struct Domain1D {
    double x_lo = 0.0;
    double x_hi = 1.0;
    GeometryKind geometry = GeometryKind::Line;
    int dim = 1; // ambient dimension for Radial (>= 1)

    void validate() const;
};

using TimeFunction = std::function<double(double)>;

struct BoundaryEnd {
    enum class Kind { DirichletFunction, Symmetry } kind = Kind::DirichletFunction;
    TimeFunction value; // for DirichletFunction
};

struct BoundarySpec {
    BoundaryEnd lo, hi;
};

struct PdeControls {
    double cfl = 0.4;              // dt <= cfl h^2
    double transport_safety = 0.4; // dt <= c h / (p max|u_x|^{p-1})
    double grad_cap = 1e6;
    double corner_tol = 1e-8;
};

/// Method-of-lines run of u_t = Δu + |∇u|^p on an interval (Line) or the
/// radially symmetric Laplacian u_rr + (n-1)/r u_r (Radial, symmetry at 0).
struct PdeRun {
    Domain1D domain;
    double p = 0.0;
    double h = 0.0;
    int n_nodes = 0;
    std::vector<double> grid;
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> snapshots;
    BoundaryEnd::Kind lo_kind = BoundaryEnd::Kind::DirichletFunction;

    // diagnostics
    double max_grad_seen = 0.0;
    double dt_min = 0.0, dt_max = 0.0;
    long step_count = 0;

    enum class Termination { Completed, BlowUpDetected } termination = Termination::Completed;
    double blowup_time = 0.0;

    double x_of(int i) const { return grid[static_cast<std::size_t>(i)]; }
};

/// Second-order central differences in space, explicit adaptive Euler in time
/// with dt <= cfl h^2 and a transport restriction from the gradient term.
/// Aborts with BlowUpDetected when max|u_x| exceeds the cap.
PdeRun solve(const ExponentContext& ctx, const Domain1D& domain, double h,
             const std::function<double(double)>& initial, const BoundarySpec& boundary,
             double t_end, const std::vector<double>& snapshot_times, const PdeControls& controls);

/// u_t recovered from the spatial operator: discrete(Δu) + |discrete(u_x)|^p.
/// Dirichlet ends use one-sided second-order differences (diagnostics only).
std::vector<double> ut_field(const PdeRun& run, std::size_t snapshot_index);

/// Discrete u_x field of a snapshot (central interior, one-sided ends,
/// zero at a radial symmetry origin).
std::vector<double> grad_field(const PdeRun& run, std::size_t snapshot_index);

struct OrderingReport {
    bool ordered = false;
    double worst_violation = 0.0;
    double worst_x = 0.0;
    double worst_t = 0.0;
};

/// Discrete comparison-principle check: run_lo <= run_hi pointwise at all
/// snapshots within 1e-8 * scale.
OrderingReport comparison_probe(const PdeRun& run_lo, const PdeRun& run_hi);

} // namespace dhj
