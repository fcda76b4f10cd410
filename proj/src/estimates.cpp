#include "dhj/estimates.hpp"

#include "dhj/rk45.hpp"
#include "dhj/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dhj {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::ReportOnly: return "report-only";
    }
    return "unknown";
}

SolutionSource::SolutionSource(ClosedFormSolution s)
    : closed_(std::make_shared<const ClosedFormSolution>(std::move(s))) {
    dim_ = closed_->ambient_dim();
    p_ = closed_->context().p;
}

SolutionSource::SolutionSource(std::shared_ptr<const PdeRun> run) : run_(std::move(run)) {
    if (!run_ || run_->snapshots.empty()) {
        throw std::invalid_argument("SolutionSource: run has no snapshots");
    }
    dim_ = 1;
    p_ = run_->p;
    for (std::size_t k = 0; k < run_->snapshots.size(); ++k) {
        run_grad_.push_back(grad_field(*run_, k));
        run_ut_.push_back(ut_field(*run_, k));
    }
}

SolutionSource::SolutionSource(std::function<EvalResult(const SpaceTimePoint&)> fn, int dim,
                               double p)
    : fn_(std::move(fn)), dim_(dim), p_(p) {}

bool SolutionSource::in_domain(const SpaceTimePoint& pt) const {
    if (closed_) return closed_->in_domain(pt);
    if (run_) {
        if (pt.x.size() != 1) return false;
        const double x = pt.x[0];
        return x >= run_->domain.x_lo - 1e-12 && x <= run_->domain.x_hi + 1e-12 &&
               pt.t >= run_->snapshot_times.front() - 1e-12 &&
               pt.t <= run_->snapshot_times.back() + 1e-12;
    }
    return true;
}

EvalResult SolutionSource::eval(const SpaceTimePoint& pt) const {
    if (closed_) return closed_->eval(pt);
    if (fn_) return fn_(pt);
    if (!in_domain(pt)) throw std::domain_error("SolutionSource: point outside run coverage");

    // bilinear interpolation over (node, snapshot)
    const auto& times = run_->snapshot_times;
    auto it = std::lower_bound(times.begin(), times.end(), pt.t);
    std::size_t k1 = it == times.end() ? times.size() - 1 : static_cast<std::size_t>(it - times.begin());
    std::size_t k0 = k1 == 0 ? 0 : k1 - 1;
    double wt = 0.0;
    if (k1 > k0 && times[k1] > times[k0]) {
        wt = (pt.t - times[k0]) / (times[k1] - times[k0]);
        wt = std::clamp(wt, 0.0, 1.0);
    } else {
        k0 = k1;
    }
    const double x = std::clamp(pt.x[0], run_->domain.x_lo, run_->domain.x_hi);
    const double fi = (x - run_->domain.x_lo) / run_->h;
    std::size_t i0 = std::min(static_cast<std::size_t>(fi),
                              static_cast<std::size_t>(run_->n_nodes - 2));
    const double wx = std::clamp(fi - static_cast<double>(i0), 0.0, 1.0);

    auto blend = [&](const std::vector<std::vector<double>>& field_by_snap) {
        auto lerp_x = [&](const std::vector<double>& f) {
            return (1.0 - wx) * f[i0] + wx * f[i0 + 1];
        };
        return (1.0 - wt) * lerp_x(field_by_snap[k0]) + wt * lerp_x(field_by_snap[k1]);
    };

    EvalResult e;
    auto lerp_u = [&](std::size_t k) {
        const auto& f = run_->snapshots[k];
        return (1.0 - wx) * f[i0] + wx * f[i0 + 1];
    };
    e.u = (1.0 - wt) * lerp_u(k0) + wt * lerp_u(k1);
    e.grad_u = {blend(run_grad_)};
    e.u_t = blend(run_ut_);
    e.laplacian_u = e.u_t - pow_abs(std::abs(e.grad_u[0]), p_);
    return e;
}

SolutionSource SolutionSource::rescaled(double lambda) const {
    if (!closed_) {
        throw std::invalid_argument(
            "SolutionSource::rescaled: only closed forms rescale exactly; re-solve runs instead");
    }
    return SolutionSource(closed_->rescaled(lambda));
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(n);
    if (n == 1) {
        out.push_back(hi);
        return out;
    }
    const double ratio = std::log(hi / lo);
    for (int j = 0; j < n; ++j) out.push_back(lo * std::exp(ratio * j / (n - 1)));
    out.back() = hi;
    return out;
}

std::vector<std::vector<double>> ball_points(const SolutionSource& src,
                                             const std::vector<double>& center, double R, int nx) {
    const int dim = src.ambient_dim();
    std::vector<std::vector<double>> pts;
    if (src.pde_run()) {
        const PdeRun* run = src.pde_run();
        for (int i = 0; i < run->n_nodes; ++i) {
            const double x = run->x_of(i);
            if (std::abs(x - center[0]) <= R + 1e-12) pts.push_back({x});
        }
        return pts;
    }
    std::vector<double> axis;
    if (nx == 1) {
        axis.push_back(0.0);
    } else {
        for (int i = 0; i < nx; ++i) axis.push_back(-R + 2.0 * R * i / (nx - 1));
    }
    if (dim == 1) {
        for (double d : axis) pts.push_back({center[0] + d});
        return pts;
    }
    // tensor grid clipped to the ball; kept modest per axis in higher dim
    const int per_axis = dim == 2 ? std::min(nx, 21) : std::min(nx, 9);
    std::vector<double> ax2;
    for (int i = 0; i < per_axis; ++i) ax2.push_back(-R + 2.0 * R * i / (per_axis - 1));
    std::vector<int> idx(dim, 0);
    while (true) {
        std::vector<double> x(dim);
        double r2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            x[d] = center[d] + ax2[idx[d]];
            r2 += ax2[idx[d]] * ax2[idx[d]];
        }
        if (r2 <= R * R * (1.0 + 1e-12)) pts.push_back(std::move(x));
        int d = 0;
        while (d < dim && ++idx[d] == per_axis) idx[d++] = 0;
        if (d == dim) break;
    }
    return pts;
}

std::vector<double> time_points(const SolutionSource& src, double T, const GridOptions& opts) {
    if (src.pde_run()) {
        std::vector<double> ts;
        for (double t : src.pde_run()->snapshot_times) {
            if (t > 0.0 && t <= T + 1e-12) ts.push_back(t);
        }
        return ts;
    }
    return log_spaced(opts.t_floor_factor * T, T, opts.nt);
}

bool lex_less(const SpaceTimePoint& a, const SpaceTimePoint& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.x < b.x;
}

struct SupTracker {
    double sup = 0.0;
    SpaceTimePoint argmax;
    bool seen = false;

    void offer(double v, const SpaceTimePoint& pt) {
        if (!seen || v > sup || (v == sup && lex_less(pt, argmax))) {
            sup = v;
            argmax = pt;
            seen = true;
        }
    }
};

} // namespace

EstimateReport bernstein_ratio(const SolutionSource& src, const std::vector<double>& center,
                               double R, double T, const GridOptions& opts) {
    EstimateReport rep;
    rep.id = "bernstein";
    const double p = src.p();

    const auto outer = ball_points(src, center, R, opts.nx);
    const auto inner = ball_points(src, center, R / 2.0, opts.nx);
    const auto times = time_points(src, T, opts);

    double M = -std::numeric_limits<double>::infinity();
    for (const auto& x : outer) {
        for (double t : times) {
            SpaceTimePoint pt{x, t};
            if (!src.in_domain(pt)) throw std::domain_error("bernstein_ratio: source does not cover the cylinder");
            M = std::max(M, src.eval(pt).u);
        }
    }

    SupTracker sup;
    long skipped = 0;
    rep.verdict = Verdict::Pass;
    for (double t : times) {
        for (const auto& x : inner) {
            SpaceTimePoint pt{x, t};
            const EvalResult e = src.eval(pt);
            const double mu = std::max(M - e.u, 0.0);
            const double den = mu / R + std::pow(mu / std::min(R * R, t), 1.0 / p);
            const double g = grad_norm(e);
            ++rep.samples;
            if (den == 0.0) {
                if (g == 0.0) {
                    ++skipped;
                    continue;
                }
                rep.verdict = Verdict::Fail;
                rep.notes = "denominator vanished with |grad u| > 0";
                sup.offer(std::numeric_limits<double>::infinity(), pt);
                continue;
            }
            sup.offer(g / den, pt);
        }
    }
    rep.sup_ratio = sup.seen ? sup.sup : 0.0;
    rep.argmax = sup.argmax;
    rep.values.emplace_back("sup_u", M);
    rep.values.emplace_back("degenerate_skipped", static_cast<double>(skipped));
    if (rep.verdict == Verdict::Pass && !std::isfinite(rep.sup_ratio)) rep.verdict = Verdict::Fail;
    return rep;
}

EstimateReport li_yau_pointwise_ratio(const SolutionSource& src, const std::vector<double>& center,
                                      double R, double a, double T, const GridOptions& opts) {
    const double p = src.p();
    if (p < 2.0) {
        throw std::invalid_argument(
            "li_yau_pointwise_ratio: requires p >= 2 (see li_yau_failure_probe for p < 2)");
    }
    const double a_hi = p == 2.0 ? 1.0 : std::nextafter(1.0, 0.0);
    if (!(a >= 0.0 && a <= a_hi)) {
        throw std::invalid_argument("li_yau_pointwise_ratio: a must be in [0,1) (p>2) or [0,1] (p=2)");
    }
    EstimateReport rep;
    rep.id = "li-yau-pointwise";
    const double beta = 1.0 / (p - 1.0);

    const auto inner = ball_points(src, center, R / 2.0, opts.nx);
    const auto times = time_points(src, T, opts);
    SupTracker sup;
    for (double t : times) {
        const double den = std::pow(R, -beta - 1.0) + std::pow(R, 1.0 - beta) / t;
        for (const auto& x : inner) {
            SpaceTimePoint pt{x, t};
            const EvalResult e = src.eval(pt);
            const double lhs = a * pow_abs(grad_norm(e), p) - e.u_t;
            ++rep.samples;
            sup.offer(std::max(lhs, 0.0) / den, pt);
        }
    }
    rep.sup_ratio = sup.sup;
    rep.argmax = sup.argmax;
    rep.values.emplace_back("a", a);
    rep.verdict = std::isfinite(rep.sup_ratio) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

EstimateReport li_yau_two_point(const SolutionSource& src, const std::vector<double>& center,
                                double R, double T, const GridOptions& opts) {
    const double p = src.p();
    if (!(p > 2.0)) throw std::invalid_argument("li_yau_two_point: requires p > 2");
    EstimateReport rep;
    rep.id = "li-yau-two-point";
    const double beta = 1.0 / (p - 1.0);

    GridOptions coarse = opts;
    coarse.nx = std::min(opts.nx, 9);
    coarse.nt = std::min(opts.nt, 9);
    const auto pts = ball_points(src, center, R / 2.0, coarse.nx);
    const auto times = time_points(src, T, coarse);

    struct Pair {
        double D, P, Q;
    };
    std::vector<Pair> pairs;
    for (std::size_t it = 0; it < times.size(); ++it) {
        for (std::size_t is = it + 1; is < times.size(); ++is) {
            const double t = times[it], s = times[is];
            const double den_t = std::pow(R, -beta - 1.0) + std::pow(R, 1.0 - beta) / t;
            for (const auto& x : pts) {
                const double uxt = src.eval({x, t}).u;
                for (const auto& y : pts) {
                    const double uys = src.eval({y, s}).u;
                    double dist2 = 0.0;
                    for (std::size_t d = 0; d < x.size(); ++d) {
                        dist2 += (y[d] - x[d]) * (y[d] - x[d]);
                    }
                    Pair pr;
                    pr.D = uxt - uys;
                    pr.P = std::pow(pow_abs(std::sqrt(dist2), p) / (s - t), beta);
                    pr.Q = den_t * (s - t);
                    pairs.push_back(pr);
                }
            }
        }
    }
    if (pairs.empty()) throw std::invalid_argument("li_yau_two_point: empty sample set");
    rep.samples = static_cast<long>(pairs.size());

    auto needed_c2 = [&](double c1) {
        double c2 = 0.0;
        for (const auto& pr : pairs) c2 = std::max(c2, (pr.D - c1 * pr.P) / pr.Q);
        return c2;
    };
    double c1_max = 0.0, c_single = 0.0;
    for (const auto& pr : pairs) {
        if (pr.D > 0.0) {
            if (pr.P > 0.0) c1_max = std::max(c1_max, pr.D / pr.P);
            c_single = std::max(c_single, pr.D / (pr.P + pr.Q));
        }
    }
    double best_c1 = 0.0, best_c2 = needed_c2(0.0);
    double best_obj = std::max(best_c1, best_c2);
    if (c1_max > 0.0) {
        for (double c1 : log_spaced(1e-9 * c1_max + 1e-300, c1_max, 400)) {
            const double c2 = needed_c2(c1);
            const double obj = std::max(c1, c2);
            if (obj < best_obj) {
                best_obj = obj;
                best_c1 = c1;
                best_c2 = c2;
            }
        }
    }
    rep.sup_ratio = best_obj;
    rep.values.emplace_back("c1", best_c1);
    rep.values.emplace_back("c2", best_c2);
    rep.values.emplace_back("c_single", c_single);
    rep.verdict = std::isfinite(best_obj) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

EstimateReport scale_stability(const CylinderChecker& checker,
                               const std::function<SolutionSource(double)>& source_at_lambda,
                               const std::vector<double>& center, double R, double T,
                               const std::vector<double>& lambdas, double spread_tol) {
    EstimateReport base = checker(source_at_lambda(1.0), center, R, T);
    base.scale_table.clear();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double lam : lambdas) {
        EstimateReport r;
        if (lam == 1.0) {
            r = base;
        } else {
            std::vector<double> c = center;
            for (auto& ci : c) ci /= lam;
            r = checker(source_at_lambda(lam), c, R / lam, T / (lam * lam));
        }
        base.scale_table.emplace_back(lam, r.sup_ratio);
        lo = std::min(lo, r.sup_ratio);
        hi = std::max(hi, r.sup_ratio);
    }
    const double spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
    base.values.emplace_back("scale_spread", spread);
    if (base.verdict == Verdict::Pass && !(spread <= spread_tol)) {
        base.verdict = Verdict::Fail;
        base.notes = "sup ratio not scale-stable";
    }
    return base;
}

EstimateReport scale_stability(const CylinderChecker& checker, const SolutionSource& src,
                               const std::vector<double>& center, double R, double T,
                               const std::vector<double>& lambdas, double spread_tol) {
    return scale_stability(
        checker, [&src](double lam) { return src.rescaled(lam); }, center, R, T, lambdas,
        spread_tol);
}

EstimateReport halfspace_growth_ratio(const SolutionSource& src, const HalfspaceGridOptions& opts) {
    EstimateReport rep;
    rep.id = "halfspace-growth";
    const double p = src.p();
    const double beta = 1.0 / (p - 1.0);

    {
        // reject up front when the profile cannot cover the grid corner
        SpaceTimePoint corner{{opts.x_max}, -opts.t_min};
        if (!src.in_domain(corner)) {
            throw std::domain_error(
                "halfspace_growth_ratio: profile coverage insufficient for requested grid");
        }
    }

    const auto xs = log_spaced(opts.x_min, opts.x_max, opts.nx);
    const auto ts = log_spaced(opts.t_min, opts.t_max, opts.nt);
    SupTracker sup_u, sup_g;
    for (double tau : ts) {
        for (double x : xs) {
            SpaceTimePoint pt{{x}, -tau};
            const EvalResult e = src.eval(pt);
            const double den_u = std::pow(x, 1.0 - beta) + std::pow(x, 1.0 + beta) * std::pow(tau, -beta);
            const double den_g = std::pow(x, -beta) + std::pow(x, beta) * std::pow(tau, -beta);
            sup_u.offer(e.u / den_u, pt);
            sup_g.offer(std::abs(e.grad_u[0]) / den_g, pt);
            ++rep.samples;
        }
    }

    // tail fits at the smallest |t|: u ~ L |t|^{-beta} x^{1+beta}
    const double tau0 = ts.front();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n_fit = 0, amp_sum = 0;
    for (double x : xs) {
        if (x / std::sqrt(tau0) < opts.y_fit_min) continue;
        const double u = src.eval({{x}, -tau0}).u;
        const double lx = std::log(x), lu = std::log(u);
        sx += lx;
        sy += lu;
        sxx += lx * lx;
        sxy += lx * lu;
        amp_sum += u / (std::pow(tau0, -beta) * std::pow(x, 1.0 + beta));
        n_fit += 1;
    }
    double slope = 0.0, amplitude = 0.0;
    if (n_fit >= 2) {
        slope = (n_fit * sxy - sx * sy) / (n_fit * sxx - sx * sx);
        amplitude = amp_sum / n_fit;
    }

    rep.sup_ratio = sup_u.sup;
    rep.argmax = sup_u.argmax;
    rep.values.emplace_back("sup_u_ratio", sup_u.sup);
    rep.values.emplace_back("sup_grad_ratio", sup_g.sup);
    rep.values.emplace_back("slope", slope);
    rep.values.emplace_back("slope_expected", 1.0 + beta);
    rep.values.emplace_back("amplitude", amplitude);
    rep.verdict = std::isfinite(sup_u.sup) && std::isfinite(sup_g.sup) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

EstimateReport li_yau_failure_probe(const ExponentContext& ctx, int dim,
                                    const FailureProbeOptions& opts) {
    if (!(ctx.p > 1.0 && ctx.p < 2.0)) {
        throw std::invalid_argument("li_yau_failure_probe: requires 1 < p < 2");
    }
    EstimateReport rep;
    rep.id = "li-yau-failure";

    Domain1D dom;
    dom.x_lo = 0.0;
    dom.x_hi = opts.r_big;
    dom.geometry = GeometryKind::Radial;
    dom.dim = dim;
    auto initial = [](double r) { return std::exp(-r * r); };
    BoundarySpec bc;
    bc.lo.kind = BoundaryEnd::Kind::Symmetry;
    bc.hi.kind = BoundaryEnd::Kind::DirichletFunction;
    const double edge = initial(opts.r_big);
    bc.hi.value = [edge](double) { return edge; };

    std::vector<double> snaps = log_spaced(opts.t_probe * 1e-2, opts.t_probe, opts.snapshots);
    snaps.insert(snaps.begin(), 0.0);
    PdeControls controls;
    PdeRun run = solve(ctx, dom, opts.h, initial, bc, opts.t_probe, snaps, controls);

    double worst = -std::numeric_limits<double>::infinity(); // max over t>0 of u_t(0,t)
    double best = std::numeric_limits<double>::infinity();
    double first_positive = 0.0;
    bool have_first = false;
    for (std::size_t k = 0; k < run.snapshot_times.size(); ++k) {
        if (!(run.snapshot_times[k] > 0.0)) continue;
        const double ut0 = ut_field(run, k)[0];
        if (!have_first) {
            first_positive = ut0;
            have_first = true;
        }
        worst = std::max(worst, ut0);
        best = std::min(best, ut0);
        ++rep.samples;
    }

    rep.sup_ratio = -best; // magnitude of the most negative u_t(0, ·)
    rep.values.emplace_back("ut0_first", first_positive);
    rep.values.emplace_back("ut0_max", worst);
    rep.values.emplace_back("ut0_min", best);
    rep.values.emplace_back("expected_limit", -2.0 * dim);
    rep.verdict = worst < -opts.margin ? Verdict::Pass : Verdict::Fail;
    if (rep.verdict == Verdict::Fail) rep.notes = "u_t(0,t) failed to stay negative";
    return rep;
}

EstimateReport li_yau_optimality_probe(const ExponentContext& ctx, double alpha, double a,
                                       const IntegratorControls& controls) {
    if (!(ctx.p > 2.0)) throw std::invalid_argument("li_yau_optimality_probe: requires p > 2");
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("li_yau_optimality_probe: requires a in (0,1)");
    const ForwardClass fc = classify_forward(ctx, alpha, controls);
    if (fc.tag != ForwardTag::J1) {
        throw std::invalid_argument("li_yau_optimality_probe: alpha=" + std::to_string(alpha) +
                                    " classified " + forward_tag_name(fc.tag) + ", requires J1");
    }
    const ProfileTrajectory traj = integrate(forward_ode(ctx), alpha, controls);
    const double y_event = *fc.witness_y;
    const double lambda = std::max(1.0, y_event) + 0.05;
    if (!traj.covers(lambda)) {
        throw std::runtime_error("li_yau_optimality_probe: no qualifying lambda within horizon");
    }
    const TrajectorySample s = traj.at(lambda);
    if (!(s.phi_pp < 0.0 && s.phi_prime > 0.0)) {
        throw std::runtime_error("li_yau_optimality_probe: shape conditions not met at lambda");
    }
    const double L = (a - 1.0) * pow_abs(s.phi_prime, ctx.p) - s.phi_pp;

    EstimateReport rep;
    rep.id = "li-yau-optimality";
    rep.sup_ratio = L;
    rep.samples = static_cast<long>(traj.samples.size());
    rep.values.emplace_back("lambda", lambda);
    rep.values.emplace_back("phi_prime", s.phi_prime);
    rep.values.emplace_back("phi_pp", s.phi_pp);
    rep.values.emplace_back("L", L);
    rep.values.emplace_back("a", a);
    rep.verdict = L > 0.0 ? Verdict::Pass : Verdict::Fail;
    return rep;
}

EstimateReport ode_inequality_bound_check(double gamma, double k, double A,
                                          InequalityDirection direction, double t0, double t1,
                                          double y0, const OdeBoundCheckOptions& opts) {
    if (!(gamma > 1.0 && k > 0.0 && A >= 0.0)) {
        throw std::invalid_argument("ode_inequality_bound_check: requires gamma > 1, k > 0, A >= 0");
    }
    if (!(t1 > t0)) throw std::invalid_argument("ode_inequality_bound_check: requires t1 > t0");
    const double sgn = direction == InequalityDirection::BlowUp ? +1.0 : -1.0;

    std::vector<std::pair<double, double>> samples;
    samples.emplace_back(t0, y0);
    const double forced_dt = (t1 - t0) / opts.forced_samples;

    auto rhs = [&](double, const std::array<double, 1>& y) {
        return std::array<double, 1>{sgn * (k * pow_abs(y[0], gamma) - A)};
    };
    Rk45Options ropt;
    ropt.rel_tol = 1e-12;
    ropt.abs_tol = 1e-14;
    ropt.max_step = (t1 - t0) / 16.0;

    bool guard_hit = false;
    double t_guard = t1, y_guard = y0;
    auto observer = [&](const RkStep<1>& st) -> bool {
        double g = (std::floor((st.t0 - t0) / forced_dt) + 1.0) * forced_dt + t0;
        for (; g < st.t1 - 1e-15; g += forced_dt) {
            if (g > st.t0) samples.emplace_back(g, st.eval(g)[0]);
        }
        samples.emplace_back(st.t1, st.y1[0]);
        if (std::abs(st.y1[0]) >= opts.y_guard) {
            guard_hit = true;
            t_guard = st.t1;
            y_guard = st.y1[0];
            return false;
        }
        return true;
    };
    integrate_dopri5<1>(rhs, t0, {y0}, t1, ropt, observer);

    // blow-up end: extend by the A-free closed-form tail from the guard state
    double t_end_eff = t1;
    if (guard_hit) {
        t_end_eff = std::min(t1, t_guard + std::pow(std::abs(y_guard), 1.0 - gamma) / ((gamma - 1.0) * k));
    }

    const double inv_gm1 = 1.0 / (gamma - 1.0);
    const double floor_term = A > 0.0 ? std::pow(2.0 * A / k, 1.0 / gamma) : 0.0;
    double sup_norm = 0.0, late_norm = 0.0, c_fit = 0.0, max_y = -std::numeric_limits<double>::infinity();
    const double late_window = (t_end_eff - t0) / 10.0;
    for (const auto& [t, y] : samples) {
        max_y = std::max(max_y, y);
        double weight;
        if (direction == InequalityDirection::BlowUp) {
            if (!(t < t_end_eff)) continue;
            weight = std::pow(k * (t_end_eff - t), inv_gm1);
        } else {
            if (!(t > t0)) continue;
            weight = std::pow(k * (t - t0), inv_gm1);
        }
        const double norm = y * weight;
        sup_norm = std::max(sup_norm, norm);
        c_fit = std::max(c_fit, std::max(y - floor_term, 0.0) * weight);
        const bool late = direction == InequalityDirection::BlowUp ? (t_end_eff - t <= late_window)
                                                                   : (t1 - t <= late_window);
        if (late) late_norm = std::max(late_norm, norm);
    }

    EstimateReport rep;
    rep.id = "ode-inequality";
    rep.sup_ratio = sup_norm;
    rep.samples = static_cast<long>(samples.size());
    rep.values.emplace_back("sup_normalized", sup_norm);
    rep.values.emplace_back("late_normalized", late_norm);
    rep.values.emplace_back("c_fit", c_fit);
    rep.values.emplace_back("floor_term", floor_term);
    rep.values.emplace_back("max_y", max_y);
    rep.values.emplace_back("blow_up_detected", guard_hit ? 1.0 : 0.0);
    rep.values.emplace_back("t_end_effective", t_end_eff);
    rep.verdict = std::isfinite(sup_norm) && std::isfinite(c_fit) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

} // namespace dhj
