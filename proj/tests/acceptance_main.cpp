// Acceptance suite: runs every verification criterion end to end and prints
// one PASS/FAIL line per criterion. Exits nonzero when any criterion fails.

#include "dhj/closed_form.hpp"
#include "dhj/config.hpp"
#include "dhj/estimates.hpp"
#include "dhj/pde_solver.hpp"
#include "dhj/shooting.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace dhj;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream details;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            details << "[failed: " << what << "] ";
        }
    }
    void note(const std::string& s) { details << s << " "; }
};

struct SplitMix {
    std::uint64_t state;
    explicit SplitMix(std::uint64_t seed) : state(seed) {}
    double next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        return (z >> 11) * 0x1.0p-53;
    }
    double in(double lo, double hi) { return lo + (hi - lo) * next(); }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
Outcome residual_criterion() {
    Outcome out;
    const ExponentContext p3 = make_context(3.0);

    IntegratorControls c;
    c.y_max = 60.0;
    auto traj_b = std::make_shared<ProfileTrajectory>(integrate(backward_ode(p3), 0.1, c));
    auto traj_f = std::make_shared<ProfileTrajectory>(integrate(forward_ode(p3), 0.05, c));

    struct Case {
        ClosedFormSolution s;
        std::function<SpaceTimePoint(SplitMix&)> draw;
    };
    std::vector<Case> cases;
    cases.push_back({ClosedFormSolution::traveling_wave(p3, {1.0}),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(-5, 5)}, g.in(-5, 5)}; }});
    cases.push_back({ClosedFormSolution::stationary_half_line(p3, 1.0),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 10)}, g.in(-3, 3)}; }});
    cases.push_back({ClosedFormSolution::stationary_half_line(make_context(1.5), 0.5),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 10)}, g.in(-3, 3)}; }});
    cases.push_back({ClosedFormSolution::quadratic_sinh(make_context(2.0), 1.0, {0.7}),
                     [](SplitMix& g) {
                         return SpaceTimePoint{{g.in(-2, 2), g.in(0, 3)}, g.in(-1, 1)};
                     }});
    cases.push_back({ClosedFormSolution::quadratic_log_linear(make_context(2.0), 2.0),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 10)}, g.in(-3, 3)}; }});
    cases.push_back({ClosedFormSolution::log_heat_kernel(make_context(2.0), 2),
                     [](SplitMix& g) {
                         return SpaceTimePoint{{g.in(-3, 3), g.in(-3, 3)}, g.in(0.01, 4)};
                     }});
    cases.push_back({ClosedFormSolution::linear_optimality(p3, 0.01),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(-2, 2)}, g.in(0.001, 1)}; }});
    cases.push_back({ClosedFormSolution::self_similar(ProfileDirection::Backward, traj_b),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 2)}, -g.in(0.01, 3)}; }});
    cases.push_back({ClosedFormSolution::self_similar(ProfileDirection::Forward, traj_f),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 2)}, g.in(0.01, 3)}; }});

    std::uint64_t seed = 42;
    double worst = 0.0;
    for (const auto& cs : cases) {
        SplitMix gen(seed++);
        for (int i = 0; i < 1000; ++i) {
            const SpaceTimePoint pt = cs.draw(gen);
            const EvalResult e = cs.s.eval(pt);
            const double scale =
                1.0 + std::abs(e.u_t) + std::abs(e.laplacian_u) + pow_abs(grad_norm(e), cs.s.context().p);
            const double r = std::abs(cs.s.residual(pt)) / scale;
            if (r > worst) worst = r;
        }
    }
    out.require(worst <= 1e-9, "max scaled residual " + fmt(worst) + " > 1e-9");
    out.note("max scaled residual " + fmt(worst) + " over " + fmt(cases.size() * 1000.0) + " points");
    return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome backward_profile_criterion() {
    Outcome out;
    for (double p : {2.5, 3.0, 4.0}) {
        const ExponentContext ctx = make_context(p);
        IntegratorControls c;
        c.y_max = 220.0;
        const double alpha = 0.5 * backward_alpha0(ctx);
        const auto res = backward_profile(ctx, alpha, c);
        out.require(res.report.phi_positive && res.report.phi_prime_positive,
                    "positivity at p=" + fmt(p));
        out.require(res.report.upcross_count == 1, "single phi'' sign change at p=" + fmt(p));
        out.require(res.report.psi_rel_err_vs_limit <= 0.02,
                    "psi limit err " + fmt(res.report.psi_rel_err_vs_limit) + " at p=" + fmt(p));
        out.note("p=" + fmt(p) + " psi_err=" + fmt(res.report.psi_rel_err_vs_limit));
    }
    return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome forward_shooting_criterion() {
    Outcome out;
    for (double p : {3.0, 4.0}) {
        const ExponentContext ctx = make_context(p);
        IntegratorControls c;
        const double a1 = forward_alpha1(ctx);

        out.require(classify_forward(ctx, a1 / 2.0, c).tag == ForwardTag::J1,
                    "classify(alpha1/2)=J1 at p=" + fmt(p));
        out.require(classify_forward(ctx, 2.0, c).tag == ForwardTag::J2,
                    "classify(2)=J2 at p=" + fmt(p));

        const auto res = critical_alpha(ctx, 1e-6, c);
        out.require(res.hi - res.lo <= 1e-6, "bracket width at p=" + fmt(p));
        out.require(res.lo >= a1 * (1.0 - 1e-12) && res.hi <= 1.0,
                    "bracket inside [alpha1, 1] at p=" + fmt(p));
        out.note("p=" + fmt(p) + " alpha*=" + fmt(res.alpha_star));

        int state = 0; // J1 -> undetermined -> J2, no inversions allowed
        bool monotone = true;
        for (int i = 0; i < 50; ++i) {
            const double alpha = (a1 / 2.0) * std::pow(4.0 / (a1 / 2.0), i / 49.0);
            const ForwardTag tag = classify_forward(ctx, alpha, c).tag;
            if (tag == ForwardTag::J1 && state > 0) monotone = false;
            if (tag == ForwardTag::Undetermined) state = std::max(state, 1);
            if (tag == ForwardTag::J2) state = 2;
        }
        out.require(monotone && state == 2, "grid classification monotone at p=" + fmt(p));
    }
    return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome critical_profile_criterion() {
    Outcome out;
    const ExponentContext ctx = make_context(3.0);
    IntegratorControls c;
    // deepest honest bracket: bisection runs to the double-precision floor
    const auto bracket = critical_alpha(ctx, 1e-16, c);
    const auto rep = critical_profile_report(ctx, bracket, c);
    out.require(rep.bounds_ok, "profile bounds within slack 1e-3 up to horizon");
    out.require(rep.horizon >= 20.0,
                "divergence horizon " + fmt(rep.horizon) +
                    " < 20 (separatrix error grows like exp(y^2/4); unreachable in double "
                    "precision, see report)");
    out.require(rep.psi_rel_err_vs_limit <= 0.05,
                "psi at horizon err " + fmt(rep.psi_rel_err_vs_limit));
    out.note("bracket width " + fmt(rep.bracket_width) + ", horizon " + fmt(rep.horizon) +
             ", psi err " + fmt(rep.psi_rel_err_vs_limit) + ", min bound gaps (" +
             fmt(rep.min_phi_minus_alpha_y) + ", " + fmt(rep.min_lower_gap) + ", " +
             fmt(rep.min_upper_gap) + ")");
    return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome pde_convergence_criterion() {
    Outcome out;
    auto manufactured_error = [](const ClosedFormSolution& fam, double x_lo, double x_hi, double h,
                                 double t_end) {
        Domain1D dom{x_lo, x_hi, GeometryKind::Line, 1};
        BoundarySpec bc;
        bc.lo.kind = BoundaryEnd::Kind::DirichletFunction;
        bc.lo.value = [&fam, x_lo](double t) { return fam.eval({{x_lo}, t}).u; };
        bc.hi.kind = BoundaryEnd::Kind::DirichletFunction;
        bc.hi.value = [&fam, x_hi](double t) { return fam.eval({{x_hi}, t}).u; };
        const PdeRun run = solve(fam.context(), dom, h,
                                 [&fam](double x) { return fam.eval({{x}, 0.0}).u; }, bc, 0.1,
                                 {0.1}, {});
        double linf = 0.0, scale = 1.0;
        for (int i = 0; i < run.n_nodes; ++i) {
            const double exact = fam.eval({{run.x_of(i)}, 0.1}).u;
            scale = std::max(scale, std::abs(exact));
            linf = std::max(linf, std::abs(run.snapshots.back()[i] - exact));
        }
        return std::pair<double, double>{linf, scale};
    };

    struct Fam {
        std::string name;
        ClosedFormSolution s;
        double x_hi;
    };
    std::vector<Fam> fams;
    fams.push_back({"traveling-wave", ClosedFormSolution::traveling_wave(make_context(3.0), {1.0}), 1.0});
    fams.push_back({"quadratic-sinh", ClosedFormSolution::quadratic_sinh(make_context(2.0), 1.0, {}), 2.0});
    fams.push_back(
        {"stationary-half-line", ClosedFormSolution::stationary_half_line(make_context(3.0), 1.0), 1.0});

    for (const auto& f : fams) {
        const auto [e1, s1] = manufactured_error(f.s, 0.0, f.x_hi, 1.0 / 64, 0.1);
        const auto [e2, s2] = manufactured_error(f.s, 0.0, f.x_hi, 1.0 / 128, 0.1);
        if (e1 <= 1e-11 * s1 && e2 <= 1e-11 * s2) {
            // affine-in-x data is reproduced exactly by central differences;
            // the O(h^2) bound holds trivially and the order ratio is 0/0
            out.note(f.name + ": exact to rounding (order check vacuous)");
            continue;
        }
        const double order = std::log2(e1 / e2);
        out.require(order >= 1.8 && order <= 2.2, f.name + " order " + fmt(order));
        out.note(f.name + ": order=" + fmt(order));
    }
    return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome liyau_failure_criterion() {
    Outcome out;
    for (int n : {1, 2}) {
        const EstimateReport rep = li_yau_failure_probe(make_context(1.5), n, {});
        double ut_max = 0.0, ut_first = 0.0;
        for (const auto& [k, v] : rep.values) {
            if (k == "ut0_max") ut_max = v;
            if (k == "ut0_first") ut_first = v;
        }
        out.require(ut_max < 0.0, "u_t(0,t) < 0 on (0, 0.01] for n=" + fmt(n));
        out.require(std::abs(ut_first + 2.0 * n) <= 0.1 * 2.0 * n,
                    "u_t(0,0+) within 10% of -2n for n=" + fmt(n));
        out.note("n=" + fmt(n) + " u_t(0,0+)=" + fmt(ut_first));
    }
    return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome liyau_pointwise_criterion() {
    Outcome out;
    for (int n : {1, 2}) {
        std::vector<double> center(n, 0.0);
        SolutionSource src(ClosedFormSolution::log_heat_kernel(make_context(2.0), n));
        const EstimateReport rep = li_yau_pointwise_ratio(src, center, 1.0, 1.0, 1.0);
        out.require(rep.sup_ratio <= 0.5 * n + 1e-6,
                    "sup ratio " + fmt(rep.sup_ratio) + " <= n/2 for n=" + fmt(n));
        out.note("n=" + fmt(n) + " sup=" + fmt(rep.sup_ratio));
    }
    return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome bernstein_optimality_criterion() {
    Outcome out;
    SolutionSource src(ClosedFormSolution::linear_optimality(make_context(3.0), 1e-4));
    const EstimateReport rep = bernstein_ratio(src, {0.0}, 2.0, 1.0);
    double M = 0.0;
    for (const auto& [k, v] : rep.values) {
        if (k == "sup_u") M = v;
    }
    const EvalResult e = src.eval({{1.0}, 1.0});
    const double mu = M - e.u;
    const double grad = e.grad_u[0];
    out.require(std::abs(grad - 1e4) <= 1e-9 * 1e4, "|grad u| = 1/eps");
    out.require(std::abs(mu - grad) <= 1e-6 * grad, "M - u = |grad u| identity");
    const double t_term = std::pow(mu / 1.0, 1.0 / 3.0);
    out.require(grad / t_term > 1e2, "space term dominates the time term by > 1e2");
    out.note("M-u=" + fmt(mu) + " grad=" + fmt(grad) + " ratio=" + fmt(grad / t_term));
    return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome liyau_optimality_criterion() {
    Outcome out;
    IntegratorControls c;
    const EstimateReport rep = li_yau_optimality_probe(make_context(3.0), 0.05, 0.99, c);
    double lambda = 0.0, L = 0.0, pp = 0.0, pr = 0.0;
    for (const auto& [k, v] : rep.values) {
        if (k == "lambda") lambda = v;
        if (k == "L") L = v;
        if (k == "phi_pp") pp = v;
        if (k == "phi_prime") pr = v;
    }
    out.require(lambda > 1.0 && pp < 0.0 && pr > 0.0, "qualifying lambda located");
    out.require(L > 0.0, "L(a,lambda) > 0");
    out.note("lambda=" + fmt(lambda) + " L=" + fmt(L));
    return out;
}

// --------------------------------------------------------------- criterion 10
Outcome halfspace_criterion() {
    Outcome out;
    const ExponentContext ctx = make_context(3.0);
    IntegratorControls c;
    c.y_max = 210.0;
    auto traj = std::make_shared<ProfileTrajectory>(integrate(backward_ode(ctx), 0.1, c));
    SolutionSource src(ClosedFormSolution::self_similar(ProfileDirection::Backward, traj));

    HalfspaceGridOptions opts;
    const EstimateReport base = halfspace_growth_ratio(src, opts);
    double slope = 0.0, amplitude = 0.0, sup_u = 0.0, sup_g = 0.0;
    for (const auto& [k, v] : base.values) {
        if (k == "slope") slope = v;
        if (k == "amplitude") amplitude = v;
        if (k == "sup_u_ratio") sup_u = v;
        if (k == "sup_grad_ratio") sup_g = v;
    }
    out.require(std::isfinite(sup_u) && std::isfinite(sup_g), "sup ratios finite");
    out.require(std::abs(slope - 1.5) <= 0.02 * 1.5, "slope " + fmt(slope) + " within 2% of 1.5");
    out.require(std::abs(amplitude - ctx.L_limit) <= 0.05 * ctx.L_limit,
                "amplitude " + fmt(amplitude) + " within 5% of L");

    double lo_u = sup_u, hi_u = sup_u, lo_g = sup_g, hi_g = sup_g;
    for (double lam : {0.5, 2.0}) {
        HalfspaceGridOptions scaled = opts;
        scaled.x_min /= lam;
        scaled.x_max /= lam;
        scaled.t_min /= lam * lam;
        scaled.t_max /= lam * lam;
        const EstimateReport r = halfspace_growth_ratio(src.rescaled(lam), scaled);
        for (const auto& [k, v] : r.values) {
            if (k == "sup_u_ratio") {
                lo_u = std::min(lo_u, v);
                hi_u = std::max(hi_u, v);
            }
            if (k == "sup_grad_ratio") {
                lo_g = std::min(lo_g, v);
                hi_g = std::max(hi_g, v);
            }
        }
    }
    out.require((hi_u - lo_u) / hi_u <= 0.2, "u ratio stable within 20% across lambda");
    out.require((hi_g - lo_g) / hi_g <= 0.2, "grad ratio stable within 20% across lambda");
    out.note("slope=" + fmt(slope) + " amplitude=" + fmt(amplitude) + " sup_u=" + fmt(sup_u));
    return out;
}

// --------------------------------------------------------------- criterion 11
Outcome ode_inequality_criterion() {
    Outcome out;
    const EstimateReport riccati =
        ode_inequality_bound_check(2.0, 1.0, 0.0, InequalityDirection::BlowUp, 0.0, 1.0, 10.0);
    double sup_norm = 0.0;
    for (const auto& [k, v] : riccati.values) {
        if (k == "sup_normalized") sup_norm = v;
    }
    out.require(std::abs(sup_norm - 1.0) <= 1e-6,
                "riccati normalized constant " + fmt(sup_norm) + " within 1e-6 of 1");

    for (double A : {0.5, 2.0}) {
        const EstimateReport rep =
            ode_inequality_bound_check(2.0, 1.0, A, InequalityDirection::BlowUp, 0.0, 1.0, 10.0);
        double c_fit = 0.0;
        for (const auto& [k, v] : rep.values) {
            if (k == "c_fit") c_fit = v;
        }
        out.require(std::isfinite(c_fit) && c_fit > 0.0, "A=" + fmt(A) + " fitted C finite");
        out.note("A=" + fmt(A) + " C=" + fmt(c_fit));
    }
    out.note("riccati=" + fmt(sup_norm));
    return out;
}

// --------------------------------------------------------------- criterion 12
Outcome determinism_criterion() {
    Outcome out;
    const std::string cli = DHJ_CLI_PATH;

    auto slurp = [](const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    };
    auto run = [&](const std::string& args) {
        const int rc = std::system((cli + " " + args).c_str());
        return WEXITSTATUS(rc);
    };

    // configs used by the pde / verify / sweep jobs
    {
        std::ofstream pde("acc_pde_cfg.json");
        pde << R"({"p": 2.0,
  "domain": {"x_lo": 0.0, "x_hi": 2.0, "geometry": "line"},
  "h": 0.03125, "t_end": 0.05, "snapshots": [0.05],
  "initial": {"family": {"family": "quadratic-sinh", "k": 1.0, "drift": []}},
  "boundary": {"lo": {"kind": "dirichlet", "from_initial_family": true},
               "hi": {"kind": "dirichlet", "from_initial_family": true}}})";
        std::ofstream ver("acc_verify_cfg.json");
        ver << R"({"check": "ode-inequality", "gamma": 2.0, "k": 1.0, "A": 0.0,
  "direction": "blow-up", "t0": 0.0, "t1": 1.0, "y0": 10.0,
  "require": {"sup_normalized": {"target": 1.0, "atol": 1e-6}}})";
        std::ofstream sw("acc_sweep_cfg.json");
        sw << R"({"jobs": [{"command": "context", "p": 4.0},
                  {"command": "context", "p": 2.5},
                  {"command": "context", "p": 3.0}]})";
    }

    struct Job {
        std::string name;
        std::string args;                  // without the output path
        std::vector<std::string> suffixes; // empty: --out is a single json file
    };
    std::vector<Job> jobs = {
        {"context", "context --p 3 --no-timestamp --out ", {}},
        {"profile", "profile --backward --p 3 --alpha 0.1 --y-max 60 --no-timestamp --out ",
         {".json", ".csv"}},
        {"critical-alpha", "critical-alpha --p 3 --tol 1e-6 --no-timestamp --out ", {}},
        {"pde", "pde --config acc_pde_cfg.json --no-timestamp --out ", {".json", ".snap0.csv"}},
        {"verify", "verify --config acc_verify_cfg.json --no-timestamp --out ", {}},
        {"sweep", "sweep --config acc_sweep_cfg.json --no-timestamp --out ", {}},
    };

    for (const auto& job : jobs) {
        const std::string base_a = "acc_" + job.name + "_a";
        const std::string base_b = "acc_" + job.name + "_b";
        const std::vector<std::string> suffixes =
            job.suffixes.empty() ? std::vector<std::string>{".json"} : job.suffixes;
        const std::string out_a = job.suffixes.empty() ? base_a + ".json" : base_a;
        const std::string out_b = job.suffixes.empty() ? base_b + ".json" : base_b;
        const int rc_a = run(job.args + out_a + " >/dev/null 2>&1");
        const int rc_b = run(job.args + out_b + " >/dev/null 2>&1");
        out.require(rc_a == rc_b, job.name + " exit codes differ");
        bool identical = true;
        for (const auto& suffix : suffixes) {
            const std::string fa = job.suffixes.empty() ? out_a : base_a + suffix;
            const std::string fb = job.suffixes.empty() ? out_b : base_b + suffix;
            const std::string ca = slurp(fa);
            if (ca.empty() || ca != slurp(fb)) identical = false;
        }
        out.require(identical, job.name + " outputs not byte-identical");
    }
    return out;
}

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> fn;
    double time_limit_s; // 0 = no stated limit
};

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "closed-form residuals <= 1e-9*scale", residual_criterion, 1.0},
        {2, "backward profiles: shape and psi limit", backward_profile_criterion, 5.0},
        {3, "forward shooting: anchors, bisection, monotone grid", forward_shooting_criterion, 30.0},
        {4, "critical profile bounds up to the divergence horizon", critical_profile_criterion, 0.0},
        {5, "manufactured-solution spatial order in [1.8, 2.2]", pde_convergence_criterion, 60.0},
        {6, "Li-Yau failure for p < 2: u_t(0,t) < 0, limit -2n", liyau_failure_criterion, 0.0},
        {7, "Li-Yau pointwise on the log heat kernel <= n/2", liyau_pointwise_criterion, 0.0},
        {8, "Bernstein optimality family identities at eps = 1e-4", bernstein_optimality_criterion, 0.0},
        {9, "Li-Yau optimality probe: L(a,lambda) > 0", liyau_optimality_criterion, 0.0},
        {10, "half-space growth ratios, slope 1+beta, amplitude L", halfspace_criterion, 0.0},
        {11, "differential inequality: Riccati constant and fitted C", ode_inequality_criterion, 0.0},
        {12, "CLI determinism: byte-identical reruns", determinism_criterion, 0.0},
    };

    int failures = 0;
    for (auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome res;
        try {
            res = c.fn();
        } catch (const std::exception& ex) {
            res.pass = false;
            res.details << "[exception: " << ex.what() << "]";
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit_s > 0.0 && secs > c.time_limit_s) {
            res.pass = false;
            res.details << "[runtime " << fmt(secs) << "s exceeds " << fmt(c.time_limit_s) << "s]";
        }
        if (!res.pass) ++failures;
        std::printf("%s criterion %2d: %s (%.2fs) %s\n", res.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), secs, res.details.str().c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
