#include "dhj/pde_solver.hpp"

#include "dhj/ode_profile.hpp" // pow_abs

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dhj {

void Domain1D::validate() const {
    if (!(x_lo < x_hi)) throw std::invalid_argument("Domain1D: requires x_lo < x_hi");
    if (geometry == GeometryKind::Radial) {
        if (x_lo != 0.0) throw std::invalid_argument("Domain1D: radial geometry requires x_lo = 0");
        if (dim < 1) throw std::invalid_argument("Domain1D: radial dimension must be >= 1");
    }
}

namespace {

struct Operators {
    // laplacian and first derivative at interior node i (1..N-1)
    static double lap_interior(const std::vector<double>& u, int i, double h, GeometryKind geom,
                               int dim, double r) {
        const double uxx = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
        if (geom == GeometryKind::Line || dim == 1) return uxx;
        const double ur = (u[i + 1] - u[i - 1]) / (2.0 * h);
        return uxx + (dim - 1) * ur / r;
    }
    // symmetric-limit laplacian at a radial origin via the ghost point u[-1] = u[1]
    static double lap_origin(const std::vector<double>& u, double h, int dim) {
        return dim * 2.0 * (u[1] - u[0]) / (h * h);
    }
};

} // namespace

PdeRun solve(const ExponentContext& ctx, const Domain1D& domain, double h,
             const std::function<double(double)>& initial, const BoundarySpec& boundary,
             double t_end, const std::vector<double>& snapshot_times, const PdeControls& controls) {
    domain.validate();
    if (!(h > 0)) throw std::invalid_argument("solve: requires h > 0");
    const double len = domain.x_hi - domain.x_lo;
    const double n_real = len / h;
    const int n_cells = static_cast<int>(std::lround(n_real));
    if (n_cells < 2 || std::abs(n_real - n_cells) > 1e-9 * n_real) {
        throw std::invalid_argument("solve: h must divide the interval");
    }
    if (boundary.lo.kind == BoundaryEnd::Kind::Symmetry &&
        (domain.geometry != GeometryKind::Radial || domain.x_lo != 0.0)) {
        throw std::invalid_argument("solve: symmetry end only at a radial origin");
    }
    if (boundary.hi.kind == BoundaryEnd::Kind::Symmetry) {
        throw std::invalid_argument("solve: symmetry only supported at the lower end");
    }

    PdeRun run;
    run.domain = domain;
    run.p = ctx.p;
    run.h = h;
    run.n_nodes = n_cells + 1;
    run.lo_kind = boundary.lo.kind;
    run.grid.resize(run.n_nodes);
    for (int i = 0; i < run.n_nodes; ++i) run.grid[i] = domain.x_lo + i * h;

    std::vector<double> u(run.n_nodes);
    for (int i = 0; i < run.n_nodes; ++i) u[i] = initial(run.grid[i]);

    // corner compatibility: boundary data must match the initial data
    auto check_corner = [&](const BoundaryEnd& be, double x, double u0) {
        if (be.kind != BoundaryEnd::Kind::DirichletFunction) return;
        const double g0 = be.value(0.0);
        if (std::abs(g0 - u0) > controls.corner_tol * (1.0 + std::abs(u0))) {
            throw std::invalid_argument("solve: boundary/initial corner mismatch at x=" +
                                        std::to_string(x));
        }
    };
    check_corner(boundary.lo, domain.x_lo, u.front());
    check_corner(boundary.hi, domain.x_hi, u.back());

    std::vector<double> snaps = snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    if (!snaps.empty() && (snaps.front() < 0.0 || snaps.back() > t_end + 1e-12)) {
        throw std::invalid_argument("solve: snapshot times must lie in [0, t_end]");
    }
    if (snaps.empty() || snaps.back() < t_end) snaps.push_back(t_end);

    const bool radial_origin = boundary.lo.kind == BoundaryEnd::Kind::Symmetry;
    const int i_first = radial_origin ? 0 : 1;
    const int i_last = run.n_nodes - 2; // hi end always Dirichlet

    std::vector<double> du(run.n_nodes, 0.0);
    double t = 0.0;
    std::size_t next_snap = 0;
    run.dt_min = std::numeric_limits<double>::infinity();

    auto store_snapshot = [&](double time) {
        run.snapshot_times.push_back(time);
        run.snapshots.push_back(u);
    };
    while (next_snap < snaps.size() && snaps[next_snap] <= 0.0) {
        store_snapshot(0.0);
        ++next_snap;
    }

    const double diff_limit = controls.cfl * h * h;
    while (next_snap < snaps.size()) {
        // spatial operator and gradient bound
        double max_grad = 0.0;
        for (int i = i_first; i <= i_last; ++i) {
            double lap, ux;
            if (i == 0) {
                lap = Operators::lap_origin(u, h, domain.dim);
                ux = 0.0;
            } else {
                lap = Operators::lap_interior(u, i, h, domain.geometry, domain.dim, run.grid[i]);
                ux = (u[i + 1] - u[i - 1]) / (2.0 * h);
            }
            du[i] = lap + pow_abs(ux, ctx.p);
            max_grad = std::max(max_grad, std::abs(ux));
        }
        run.max_grad_seen = std::max(run.max_grad_seen, max_grad);
        if (max_grad > controls.grad_cap) {
            run.termination = PdeRun::Termination::BlowUpDetected;
            run.blowup_time = t;
            return run;
        }

        double dt = diff_limit;
        if (max_grad > 0.0) {
            const double transport = controls.transport_safety * h /
                                     (ctx.p * pow_abs(max_grad, ctx.p - 1.0));
            dt = std::min(dt, transport);
        }
        dt = std::min(dt, snaps[next_snap] - t);

        for (int i = i_first; i <= i_last; ++i) u[i] += dt * du[i];
        t += dt;
        if (boundary.lo.kind == BoundaryEnd::Kind::DirichletFunction) u.front() = boundary.lo.value(t);
        u.back() = boundary.hi.value(t);

        run.dt_min = std::min(run.dt_min, dt);
        run.dt_max = std::max(run.dt_max, dt);
        ++run.step_count;

        if (!std::isfinite(u[i_first])) {
            throw std::runtime_error("solve: non-finite field detected at t=" + std::to_string(t) +
                                     " (instability)");
        }

        if (t >= snaps[next_snap] - 1e-14 * std::max(1.0, t_end)) {
            store_snapshot(snaps[next_snap]);
            ++next_snap;
        }
    }
    if (!std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); })) {
        throw std::runtime_error("solve: non-finite field in final state (instability)");
    }
    return run;
}

std::vector<double> grad_field(const PdeRun& run, std::size_t snapshot_index) {
    if (snapshot_index >= run.snapshots.size()) {
        throw std::out_of_range("grad_field: snapshot index out of range");
    }
    const std::vector<double>& u = run.snapshots[snapshot_index];
    const double h = run.h;
    const int n = run.n_nodes;
    std::vector<double> g(n);
    for (int i = 1; i + 1 < n; ++i) g[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    if (run.lo_kind == BoundaryEnd::Kind::Symmetry) {
        g[0] = 0.0;
    } else {
        g[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    }
    g[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    return g;
}

std::vector<double> ut_field(const PdeRun& run, std::size_t snapshot_index) {
    if (snapshot_index >= run.snapshots.size()) {
        throw std::out_of_range("ut_field: snapshot index out of range");
    }
    const std::vector<double>& u = run.snapshots[snapshot_index];
    const double h = run.h;
    const int n = run.n_nodes;
    const std::vector<double> g = grad_field(run, snapshot_index);
    std::vector<double> ut(n);
    for (int i = 1; i + 1 < n; ++i) {
        const double lap = Operators::lap_interior(u, i, h, run.domain.geometry, run.domain.dim,
                                                   run.grid[i]);
        ut[i] = lap + pow_abs(g[i], run.p);
    }
    if (run.lo_kind == BoundaryEnd::Kind::Symmetry) {
        ut[0] = Operators::lap_origin(u, h, run.domain.dim);
    } else {
        const double uxx = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
        ut[0] = uxx + pow_abs(g[0], run.p);
    }
    const double uxx_end =
        (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) / (h * h);
    ut[n - 1] = uxx_end + pow_abs(g[n - 1], run.p);
    return ut;
}

OrderingReport comparison_probe(const PdeRun& run_lo, const PdeRun& run_hi) {
    if (run_lo.n_nodes != run_hi.n_nodes || run_lo.snapshot_times != run_hi.snapshot_times) {
        throw std::invalid_argument("comparison_probe: runs must share grid and snapshot times");
    }
    OrderingReport rep;
    rep.ordered = true;
    double scale = 1.0;
    for (const auto& snap : run_lo.snapshots) {
        for (double v : snap) scale = std::max(scale, std::abs(v));
    }
    for (const auto& snap : run_hi.snapshots) {
        for (double v : snap) scale = std::max(scale, std::abs(v));
    }
    const double tol = 1e-8 * scale;
    for (std::size_t k = 0; k < run_lo.snapshots.size(); ++k) {
        for (int i = 0; i < run_lo.n_nodes; ++i) {
            const double gap = run_lo.snapshots[k][i] - run_hi.snapshots[k][i];
            if (gap > rep.worst_violation) {
                rep.worst_violation = gap;
                rep.worst_x = run_lo.x_of(i);
                rep.worst_t = run_lo.snapshot_times[k];
            }
        }
    }
    rep.ordered = rep.worst_violation <= tol;
    return rep;
}

} // namespace dhj
