#include "dhj/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace dhj::cli {

namespace {

double need_double(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw std::invalid_argument(where + ": missing required key '" + key + "'");
    if (!obj.at(key).is_number()) throw std::invalid_argument(where + ": '" + key + "' must be a number");
    return obj.at(key).get<double>();
}

double opt_double(const json& obj, const std::string& key, double fallback) {
    return obj.contains(key) ? obj.at(key).get<double>() : fallback;
}

int opt_int(const json& obj, const std::string& key, int fallback) {
    return obj.contains(key) ? obj.at(key).get<int>() : fallback;
}

std::string need_string(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_string()) {
        throw std::invalid_argument(where + ": missing string key '" + key + "'");
    }
    return obj.at(key).get<std::string>();
}

std::vector<double> need_vector(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_array()) {
        throw std::invalid_argument(where + ": '" + key + "' must be an array of numbers");
    }
    return obj.at(key).get<std::vector<double>>();
}

IntegratorControls controls_from_json(const json& obj) {
    IntegratorControls c;
    c.y_max = opt_double(obj, "y_max", c.y_max);
    c.rel_tol = opt_double(obj, "rel_tol", c.rel_tol);
    c.abs_tol = opt_double(obj, "abs_tol", c.abs_tol);
    c.max_step = opt_double(obj, "max_step", c.max_step);
    c.phi_prime_cap = opt_double(obj, "phi_prime_cap", c.phi_prime_cap);
    c.event_tol = opt_double(obj, "event_tol", c.event_tol);
    return c;
}

json events_to_json(const ProfileTrajectory& traj) {
    json ev = json::array();
    for (const auto& e : traj.events) {
        ev.push_back(json{{"kind", event_kind_name(e.kind)}, {"y", e.y}});
    }
    return ev;
}

} // namespace

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw std::invalid_argument(where + ": unknown key '" + key + "'");
        }
    }
}

ClosedFormSolution family_from_json(const json& spec) {
    const std::string name = need_string(spec, "family", "family");
    if (name == "traveling-wave") {
        require_keys(spec, {"family", "p", "a"}, name);
        auto ctx = make_context(need_double(spec, "p", name));
        return ClosedFormSolution::traveling_wave(ctx, need_vector(spec, "a", name));
    }
    if (name == "stationary-half-line") {
        require_keys(spec, {"family", "p", "offset"}, name);
        auto ctx = make_context(need_double(spec, "p", name));
        return ClosedFormSolution::stationary_half_line(ctx, need_double(spec, "offset", name));
    }
    if (name == "quadratic-sinh") {
        require_keys(spec, {"family", "p", "k", "drift"}, name);
        auto ctx = make_context(opt_double(spec, "p", 2.0));
        std::vector<double> drift;
        if (spec.contains("drift")) drift = spec.at("drift").get<std::vector<double>>();
        return ClosedFormSolution::quadratic_sinh(ctx, need_double(spec, "k", name), std::move(drift));
    }
    if (name == "quadratic-log-linear") {
        require_keys(spec, {"family", "p", "k"}, name);
        auto ctx = make_context(opt_double(spec, "p", 2.0));
        return ClosedFormSolution::quadratic_log_linear(ctx, need_double(spec, "k", name));
    }
    if (name == "log-heat-kernel") {
        require_keys(spec, {"family", "p", "dim"}, name);
        auto ctx = make_context(opt_double(spec, "p", 2.0));
        return ClosedFormSolution::log_heat_kernel(ctx, opt_int(spec, "dim", 1));
    }
    if (name == "linear-optimality") {
        require_keys(spec, {"family", "p", "eps"}, name);
        auto ctx = make_context(need_double(spec, "p", name));
        return ClosedFormSolution::linear_optimality(ctx, need_double(spec, "eps", name));
    }
    if (name == "self-similar") {
        require_keys(spec, {"family", "p", "direction", "alpha", "y_max", "rel_tol", "abs_tol"},
                     name);
        auto ctx = make_context(need_double(spec, "p", name));
        const std::string dir = need_string(spec, "direction", name);
        IntegratorControls c = controls_from_json(spec);
        const double alpha = need_double(spec, "alpha", name);
        if (dir == "backward") {
            auto traj = std::make_shared<ProfileTrajectory>(integrate(backward_ode(ctx), alpha, c));
            return ClosedFormSolution::self_similar(ProfileDirection::Backward, std::move(traj));
        }
        if (dir == "forward") {
            auto traj = std::make_shared<ProfileTrajectory>(integrate(forward_ode(ctx), alpha, c));
            return ClosedFormSolution::self_similar(ProfileDirection::Forward, std::move(traj));
        }
        throw std::invalid_argument("self-similar: direction must be 'backward' or 'forward'");
    }
    throw std::invalid_argument("family_from_json: unknown family '" + name + "'");
}

json context_report(double p) {
    const ExponentContext ctx = make_context(p);
    json out;
    out["command"] = "context";
    out["p"] = ctx.p;
    out["beta"] = ctx.beta;
    out["gamma_ss"] = ctx.gamma_ss;
    if (ctx.c_p) {
        out["c_p"] = *ctx.c_p;
    } else {
        out["c_p"] = nullptr;
    }
    out["L_limit"] = ctx.L_limit;
    out["regime"] = regime_name(ctx.regime);
    return out;
}

ProfileJobResult run_profile_job(const json& params) {
    require_keys(params,
                 {"command", "direction", "p", "alpha", "y_max", "rel_tol", "abs_tol", "max_step",
                  "phi_prime_cap", "event_tol", "out"},
                 "profile");
    const std::string direction = need_string(params, "direction", "profile");
    const double p = need_double(params, "p", "profile");
    const double alpha = need_double(params, "alpha", "profile");
    const ExponentContext ctx = make_context(p);
    IntegratorControls c = controls_from_json(params);

    ProfileJobResult out;
    json& rep = out.report;
    rep["command"] = "profile";
    rep["direction"] = direction;
    rep["p"] = p;
    rep["alpha"] = alpha;
    rep["y_max"] = c.y_max;

    if (direction == "backward") {
        BackwardProfileResult res = backward_profile(ctx, alpha, c);
        out.trajectory = std::move(res.trajectory);
        rep["termination"] = termination_name(out.trajectory.termination);
        rep["events"] = events_to_json(out.trajectory);
        json shape;
        shape["phi_positive"] = res.report.phi_positive;
        shape["phi_prime_positive"] = res.report.phi_prime_positive;
        shape["upcross_count"] = res.report.upcross_count;
        if (res.report.r_bar) shape["r_bar"] = *res.report.r_bar;
        shape["psi_limit"] = res.report.psi.limit_estimate;
        shape["psi_tail_exponent"] = res.report.psi.tail_exponent;
        shape["psi_rel_err_vs_limit"] = res.report.psi_rel_err_vs_limit;
        shape["L_limit"] = ctx.L_limit;
        shape["z_tail_min"] = res.report.z_tail_min;
        shape["z_liminf_bound"] = res.report.z_liminf_bound;
        shape["z_check"] = res.report.z_check;
        shape["shape_ok"] = res.report.shape_ok;
        rep["shape"] = shape;
        out.exit_code = res.report.shape_ok ? Ok : VerificationFail;
        return out;
    }
    if (direction == "forward") {
        const ForwardClass fc = classify_forward(ctx, alpha, c);
        out.trajectory = integrate(forward_ode(ctx), alpha, c);
        rep["termination"] = termination_name(out.trajectory.termination);
        rep["events"] = events_to_json(out.trajectory);
        json cls;
        cls["tag"] = forward_tag_name(fc.tag);
        if (fc.witness_y) cls["witness_y"] = *fc.witness_y;
        cls["y_reached"] = fc.y_reached;
        if (!fc.diagnostics.empty()) cls["diagnostics"] = fc.diagnostics;
        rep["classification"] = cls;
        out.exit_code = Ok;
        return out;
    }
    throw std::invalid_argument("profile: direction must be 'backward' or 'forward'");
}

json run_critical_alpha_job(const json& params) {
    require_keys(params,
                 {"command", "p", "tol", "y_max", "y_max_cap", "rel_tol", "abs_tol", "out"},
                 "critical-alpha");
    const double p = need_double(params, "p", "critical-alpha");
    const double tol = opt_double(params, "tol", 1e-6);
    const double y_max_cap = opt_double(params, "y_max_cap", 800.0);
    const ExponentContext ctx = make_context(p);
    IntegratorControls c = controls_from_json(params);

    const CriticalAlphaResult res = critical_alpha(ctx, tol, c, y_max_cap);
    const ForwardClass lo_class = classify_forward(ctx, res.lo, c);
    IntegratorControls c_hi = c;
    c_hi.y_max = res.y_max_used;
    const ForwardClass hi_class = classify_forward(ctx, res.hi, c_hi);

    json out;
    out["command"] = "critical-alpha";
    out["p"] = p;
    out["tol"] = tol;
    out["alpha_star"] = res.alpha_star;
    out["bracket"] = json::array({res.lo, res.hi});
    out["iterations"] = res.iterations;
    out["y_max_used"] = res.y_max_used;
    json checks;
    checks["bracket_width"] = res.hi - res.lo;
    checks["lo_class"] = forward_tag_name(lo_class.tag);
    checks["hi_class"] = forward_tag_name(hi_class.tag);
    checks["alpha1"] = forward_alpha1(ctx);
    out["checks"] = checks;
    return out;
}

namespace {

struct PdeDataSpec {
    std::shared_ptr<const ClosedFormSolution> family; // when family-based
    std::function<double(double)> initial;
};

std::function<double(double)> builtin_profile(const std::string& name) {
    if (name == "gaussian") return [](double r) { return std::exp(-r * r); };
    if (name == "zero") return [](double) { return 0.0; };
    throw std::invalid_argument("pde: unknown builtin profile '" + name + "'");
}

PdeDataSpec parse_initial(const json& spec) {
    require_keys(spec, {"family", "builtin", "tabulated"}, "pde.initial");
    PdeDataSpec out;
    if (spec.contains("family")) {
        auto fam = std::make_shared<const ClosedFormSolution>(family_from_json(spec.at("family")));
        if (fam->ambient_dim() != 1) {
            throw std::invalid_argument("pde.initial: family must be one-dimensional");
        }
        out.family = fam;
        out.initial = [fam](double x) { return fam->eval({{x}, 0.0}).u; };
        return out;
    }
    if (spec.contains("builtin")) {
        out.initial = builtin_profile(spec.at("builtin").get<std::string>());
        return out;
    }
    if (spec.contains("tabulated")) {
        const json& tab = spec.at("tabulated");
        require_keys(tab, {"x", "u"}, "pde.initial.tabulated");
        auto xs = tab.at("x").get<std::vector<double>>();
        auto us = tab.at("u").get<std::vector<double>>();
        if (xs.size() != us.size() || xs.size() < 2) {
            throw std::invalid_argument("pde.initial.tabulated: x and u must be equal-length, >= 2");
        }
        out.initial = [xs = std::move(xs), us = std::move(us)](double x) {
            auto it = std::lower_bound(xs.begin(), xs.end(), x);
            if (it == xs.begin()) return us.front();
            if (it == xs.end()) return us.back();
            const std::size_t i = static_cast<std::size_t>(it - xs.begin());
            const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return (1.0 - w) * us[i - 1] + w * us[i];
        };
        return out;
    }
    throw std::invalid_argument("pde.initial: need one of family/builtin/tabulated");
}

BoundaryEnd parse_boundary_end(const json& spec, double x_end,
                               const std::shared_ptr<const ClosedFormSolution>& initial_family) {
    require_keys(spec, {"kind", "family", "constant", "from_initial_family"}, "pde.boundary");
    const std::string kind = need_string(spec, "kind", "pde.boundary");
    BoundaryEnd be;
    if (kind == "symmetry") {
        be.kind = BoundaryEnd::Kind::Symmetry;
        return be;
    }
    if (kind != "dirichlet") throw std::invalid_argument("pde.boundary: kind must be dirichlet or symmetry");
    be.kind = BoundaryEnd::Kind::DirichletFunction;
    if (spec.contains("constant")) {
        const double v = spec.at("constant").get<double>();
        be.value = [v](double) { return v; };
    } else if (spec.contains("family")) {
        auto fam = std::make_shared<const ClosedFormSolution>(family_from_json(spec.at("family")));
        be.value = [fam, x_end](double t) { return fam->eval({{x_end}, t}).u; };
    } else if (spec.contains("from_initial_family") && spec.at("from_initial_family").get<bool>()) {
        if (!initial_family) {
            throw std::invalid_argument("pde.boundary: from_initial_family requires a family initial");
        }
        auto fam = initial_family;
        be.value = [fam, x_end](double t) { return fam->eval({{x_end}, t}).u; };
    } else {
        throw std::invalid_argument("pde.boundary: dirichlet end needs constant/family/from_initial_family");
    }
    return be;
}

} // namespace

PdeJobResult run_pde_job(const json& config) {
    require_keys(config,
                 {"command", "p", "domain", "h", "t_end", "snapshots", "initial", "boundary",
                  "controls", "out"},
                 "pde");
    const double p = need_double(config, "p", "pde");
    const ExponentContext ctx = make_context(p);

    const json& dom_spec = config.at("domain");
    require_keys(dom_spec, {"x_lo", "x_hi", "geometry", "dim"}, "pde.domain");
    Domain1D dom;
    dom.x_lo = need_double(dom_spec, "x_lo", "pde.domain");
    dom.x_hi = need_double(dom_spec, "x_hi", "pde.domain");
    const std::string geom = need_string(dom_spec, "geometry", "pde.domain");
    if (geom == "line") {
        dom.geometry = GeometryKind::Line;
    } else if (geom == "radial") {
        dom.geometry = GeometryKind::Radial;
        dom.dim = opt_int(dom_spec, "dim", 1);
    } else {
        throw std::invalid_argument("pde.domain: geometry must be 'line' or 'radial'");
    }

    const double h = need_double(config, "h", "pde");
    const double t_end = need_double(config, "t_end", "pde");
    std::vector<double> snaps;
    if (config.contains("snapshots")) snaps = config.at("snapshots").get<std::vector<double>>();

    PdeDataSpec data = parse_initial(config.at("initial"));
    const json& bc_spec = config.at("boundary");
    require_keys(bc_spec, {"lo", "hi"}, "pde.boundary");
    BoundarySpec bc;
    bc.lo = parse_boundary_end(bc_spec.at("lo"), dom.x_lo, data.family);
    bc.hi = parse_boundary_end(bc_spec.at("hi"), dom.x_hi, data.family);

    PdeControls controls;
    if (config.contains("controls")) {
        const json& cs = config.at("controls");
        require_keys(cs, {"cfl", "transport_safety", "grad_cap", "corner_tol"}, "pde.controls");
        controls.cfl = opt_double(cs, "cfl", controls.cfl);
        controls.transport_safety = opt_double(cs, "transport_safety", controls.transport_safety);
        controls.grad_cap = opt_double(cs, "grad_cap", controls.grad_cap);
        controls.corner_tol = opt_double(cs, "corner_tol", controls.corner_tol);
    }

    PdeJobResult out;
    out.run = solve(ctx, dom, h, data.initial, bc, t_end, snaps, controls);

    json& rep = out.report;
    rep["command"] = "pde";
    rep["p"] = p;
    rep["h"] = h;
    rep["n_nodes"] = out.run.n_nodes;
    rep["t_end"] = t_end;
    rep["termination"] =
        out.run.termination == PdeRun::Termination::Completed ? "completed" : "blow_up_detected";
    if (out.run.termination == PdeRun::Termination::BlowUpDetected) {
        rep["blowup_time"] = out.run.blowup_time;
    }
    rep["snapshot_times"] = out.run.snapshot_times;
    rep["steps"] = out.run.step_count;
    rep["max_grad_seen"] = out.run.max_grad_seen;

    if (data.family) {
        // manufactured-solution diagnostics against the exact family
        json errs = json::array();
        for (std::size_t k = 0; k < out.run.snapshots.size(); ++k) {
            double linf = 0.0;
            for (int i = 0; i < out.run.n_nodes; ++i) {
                const double exact =
                    data.family->eval({{out.run.x_of(i)}, out.run.snapshot_times[k]}).u;
                linf = std::max(linf, std::abs(out.run.snapshots[k][i] - exact));
            }
            errs.push_back(linf);
        }
        rep["error_linf"] = errs;
    }
    return out;
}

json report_from_estimate(const EstimateReport& rep) {
    json out;
    out["id"] = rep.id;
    out["verdict"] = verdict_name(rep.verdict);
    out["sup_ratio"] = rep.sup_ratio;
    json argmax;
    argmax["x"] = rep.argmax.x;
    argmax["t"] = rep.argmax.t;
    out["argmax"] = argmax;
    out["samples"] = rep.samples;
    if (!rep.values.empty()) {
        json vals;
        for (const auto& [k, v] : rep.values) vals[k] = v;
        out["values"] = vals;
    }
    if (!rep.scale_table.empty()) {
        json table = json::array();
        for (const auto& [lam, ratio] : rep.scale_table) table.push_back(json::array({lam, ratio}));
        out["scale_table"] = table;
    }
    if (!rep.notes.empty()) out["notes"] = rep.notes;
    return out;
}

namespace {

double report_lookup(const json& report, const std::string& path) {
    const json* node = &report;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (node->is_array()) {
            node = &node->at(static_cast<std::size_t>(std::stoul(part)));
        } else {
            if (!node->contains(part)) {
                throw std::invalid_argument("report has no field '" + path + "'");
            }
            node = &node->at(part);
        }
    }
    return node->get<double>();
}

void apply_requirements(json& report, const json& require) {
    std::vector<std::string> failures;
    for (const auto& [key, constraint] : require.items()) {
        require_keys(constraint, {"max", "min", "target", "rtol", "atol"}, "verify.require." + key);
        double got;
        if (report.contains("values") && report.at("values").contains(key)) {
            got = report.at("values").at(key).get<double>();
        } else {
            got = report_lookup(report, key);
        }
        auto fail = [&](const std::string& what) {
            std::ostringstream os;
            os << key << " " << what << " (got " << got << ")";
            failures.push_back(os.str());
        };
        if (constraint.contains("max") && !(got <= constraint.at("max").get<double>())) {
            fail("exceeds max " + constraint.at("max").dump());
        }
        if (constraint.contains("min") && !(got >= constraint.at("min").get<double>())) {
            fail("below min " + constraint.at("min").dump());
        }
        if (constraint.contains("target")) {
            const double target = constraint.at("target").get<double>();
            const double rtol = opt_double(constraint, "rtol", 0.0);
            const double atol = opt_double(constraint, "atol", 0.0);
            const double tol = atol + rtol * std::abs(target);
            if (!(std::abs(got - target) <= tol)) {
                fail("misses target " + constraint.at("target").dump());
            }
        }
    }
    if (!failures.empty()) {
        report["verdict"] = "fail";
        json f = json::array();
        for (const auto& s : failures) f.push_back(s);
        report["requirement_failures"] = f;
    }
}

std::vector<double> opt_lambdas(const json& config) {
    if (!config.contains("lambdas")) return {};
    return config.at("lambdas").get<std::vector<double>>();
}

GridOptions grid_from_json(const json& config) {
    GridOptions g;
    if (config.contains("grid")) {
        const json& gs = config.at("grid");
        require_keys(gs, {"nx", "nt", "t_floor_factor"}, "verify.grid");
        g.nx = opt_int(gs, "nx", g.nx);
        g.nt = opt_int(gs, "nt", g.nt);
        g.t_floor_factor = opt_double(gs, "t_floor_factor", g.t_floor_factor);
    }
    return g;
}

} // namespace

json run_verify_job(const json& config) {
    const std::string check = need_string(config, "check", "verify");
    json report;

    if (check == "bernstein" || check == "li-yau-pointwise" || check == "li-yau-two-point") {
        require_keys(config,
                     {"command", "check", "source", "center", "R", "T", "a", "grid", "lambdas",
                      "spread_tol", "require", "out"},
                     "verify." + check);
        SolutionSource src(family_from_json(config.at("source")));
        const std::vector<double> center = need_vector(config, "center", "verify");
        const double R = need_double(config, "R", "verify");
        const double T = need_double(config, "T", "verify");
        const GridOptions grid = grid_from_json(config);
        const std::vector<double> lambdas = opt_lambdas(config);

        CylinderChecker checker;
        if (check == "bernstein") {
            checker = [grid](const SolutionSource& s, const std::vector<double>& c, double r,
                             double t) { return bernstein_ratio(s, c, r, t, grid); };
        } else if (check == "li-yau-pointwise") {
            const double a = need_double(config, "a", "verify.li-yau-pointwise");
            checker = [grid, a](const SolutionSource& s, const std::vector<double>& c, double r,
                                double t) { return li_yau_pointwise_ratio(s, c, r, a, t, grid); };
        } else {
            checker = [grid](const SolutionSource& s, const std::vector<double>& c, double r,
                             double t) { return li_yau_two_point(s, c, r, t, grid); };
        }

        EstimateReport rep;
        if (lambdas.empty()) {
            rep = checker(src, center, R, T);
        } else {
            const double spread_tol = opt_double(config, "spread_tol", 1e-6);
            rep = scale_stability(checker, src, center, R, T, lambdas, spread_tol);
        }
        report = report_from_estimate(rep);
    } else if (check == "halfspace-growth") {
        require_keys(config,
                     {"command", "check", "source", "grid", "lambdas", "spread_tol", "require",
                      "out"},
                     "verify.halfspace-growth");
        SolutionSource src(family_from_json(config.at("source")));
        HalfspaceGridOptions opts;
        if (config.contains("grid")) {
            const json& gs = config.at("grid");
            require_keys(gs, {"x_min", "x_max", "nx", "t_min", "t_max", "nt", "y_fit_min"},
                         "verify.halfspace-growth.grid");
            opts.x_min = opt_double(gs, "x_min", opts.x_min);
            opts.x_max = opt_double(gs, "x_max", opts.x_max);
            opts.nx = opt_int(gs, "nx", opts.nx);
            opts.t_min = opt_double(gs, "t_min", opts.t_min);
            opts.t_max = opt_double(gs, "t_max", opts.t_max);
            opts.nt = opt_int(gs, "nt", opts.nt);
            opts.y_fit_min = opt_double(gs, "y_fit_min", opts.y_fit_min);
        }
        EstimateReport rep = halfspace_growth_ratio(src, opts);
        const std::vector<double> lambdas = opt_lambdas(config);
        if (!lambdas.empty()) {
            const double spread_tol = opt_double(config, "spread_tol", 0.2);
            double lo_u = std::numeric_limits<double>::infinity(), hi_u = 0.0;
            double lo_g = std::numeric_limits<double>::infinity(), hi_g = 0.0;
            for (double lam : lambdas) {
                HalfspaceGridOptions scaled = opts;
                scaled.x_min /= lam;
                scaled.x_max /= lam;
                scaled.t_min /= lam * lam;
                scaled.t_max /= lam * lam;
                EstimateReport r =
                    lam == 1.0 ? rep : halfspace_growth_ratio(src.rescaled(lam), scaled);
                double sup_g = 0.0;
                for (const auto& [k, v] : r.values) {
                    if (k == "sup_grad_ratio") sup_g = v;
                }
                rep.scale_table.emplace_back(lam, r.sup_ratio);
                lo_u = std::min(lo_u, r.sup_ratio);
                hi_u = std::max(hi_u, r.sup_ratio);
                lo_g = std::min(lo_g, sup_g);
                hi_g = std::max(hi_g, sup_g);
            }
            const double spread_u = hi_u > 0 ? (hi_u - lo_u) / hi_u : 0.0;
            const double spread_g = hi_g > 0 ? (hi_g - lo_g) / hi_g : 0.0;
            rep.values.emplace_back("scale_spread_u", spread_u);
            rep.values.emplace_back("scale_spread_grad", spread_g);
            if (rep.verdict == Verdict::Pass &&
                !(spread_u <= spread_tol && spread_g <= spread_tol)) {
                rep.verdict = Verdict::Fail;
                rep.notes = "sup ratios not scale-stable";
            }
        }
        report = report_from_estimate(rep);
    } else if (check == "li-yau-failure") {
        require_keys(config,
                     {"command", "check", "p", "dim", "r_big", "h", "t_probe", "snapshots",
                      "margin", "require", "out"},
                     "verify.li-yau-failure");
        const ExponentContext ctx = make_context(need_double(config, "p", "verify"));
        FailureProbeOptions opts;
        opts.r_big = opt_double(config, "r_big", opts.r_big);
        opts.h = opt_double(config, "h", opts.h);
        opts.t_probe = opt_double(config, "t_probe", opts.t_probe);
        opts.snapshots = opt_int(config, "snapshots", opts.snapshots);
        opts.margin = opt_double(config, "margin", opts.margin);
        report = report_from_estimate(li_yau_failure_probe(ctx, opt_int(config, "dim", 1), opts));
    } else if (check == "li-yau-optimality") {
        require_keys(config,
                     {"command", "check", "p", "alpha", "a", "y_max", "rel_tol", "abs_tol",
                      "require", "out"},
                     "verify.li-yau-optimality");
        const ExponentContext ctx = make_context(need_double(config, "p", "verify"));
        IntegratorControls c = controls_from_json(config);
        report = report_from_estimate(li_yau_optimality_probe(
            ctx, need_double(config, "alpha", "verify"), need_double(config, "a", "verify"), c));
    } else if (check == "ode-inequality") {
        require_keys(config,
                     {"command", "check", "gamma", "k", "A", "direction", "t0", "t1", "y0",
                      "y_guard", "require", "out"},
                     "verify.ode-inequality");
        const std::string dir = need_string(config, "direction", "verify.ode-inequality");
        OdeBoundCheckOptions opts;
        opts.y_guard = opt_double(config, "y_guard", opts.y_guard);
        report = report_from_estimate(ode_inequality_bound_check(
            need_double(config, "gamma", "verify"), need_double(config, "k", "verify"),
            need_double(config, "A", "verify"),
            dir == "decay" ? InequalityDirection::Decay : InequalityDirection::BlowUp,
            need_double(config, "t0", "verify"), need_double(config, "t1", "verify"),
            need_double(config, "y0", "verify"), opts));
    } else {
        throw std::invalid_argument("verify: unknown check '" + check + "'");
    }

    report["command"] = "verify";
    report["check"] = check;
    if (config.contains("require")) apply_requirements(report, config.at("require"));
    return report;
}

json run_command(const std::string& command, const json& params) {
    if (command == "context") {
        return context_report(need_double(params, "p", "context"));
    }
    if (command == "profile") return run_profile_job(params).report;
    if (command == "critical-alpha") return run_critical_alpha_job(params);
    if (command == "pde") return run_pde_job(params).report;
    if (command == "verify") return run_verify_job(params);
    throw std::invalid_argument("unknown command '" + command + "'");
}

json run_sweep_job(const json& config) {
    require_keys(config, {"command", "jobs", "out"}, "sweep");
    if (!config.contains("jobs") || !config.at("jobs").is_array()) {
        throw std::invalid_argument("sweep: requires a 'jobs' array");
    }
    std::vector<json> jobs = config.at("jobs").get<std::vector<json>>();
    std::sort(jobs.begin(), jobs.end(),
              [](const json& a, const json& b) { return a.dump() < b.dump(); });
    json out;
    out["command"] = "sweep";
    json results = json::array();
    for (const auto& job : jobs) {
        const std::string cmd = need_string(job, "command", "sweep.job");
        json entry;
        entry["spec"] = job;
        entry["report"] = run_command(cmd, job);
        results.push_back(entry);
    }
    out["jobs"] = results;
    return out;
}

GoldenOutcome check_golden_records(const json& records) {
    GoldenOutcome out;
    for (const auto& record : records) {
        require_keys(record, {"job_id", "command", "params", "expect", "provenance"}, "golden");
        const std::string id = need_string(record, "job_id", "golden");
        if (!record.contains("provenance")) {
            out.ok = false;
            out.mismatches.push_back(id + ": missing provenance");
            continue;
        }
        json report;
        try {
            report = run_command(need_string(record, "command", "golden"), record.at("params"));
        } catch (const std::exception& ex) {
            out.ok = false;
            out.mismatches.push_back(id + ": job failed: " + ex.what());
            continue;
        }
        for (const auto& [path, expect] : record.at("expect").items()) {
            require_keys(expect, {"value", "tol"}, "golden.expect");
            const double want = expect.at("value").get<double>();
            const double tol = expect.at("tol").get<double>();
            double got;
            try {
                got = report_lookup(report, path);
            } catch (const std::exception& ex) {
                out.ok = false;
                out.mismatches.push_back(id + "." + path + ": " + ex.what());
                continue;
            }
            if (!(std::abs(got - want) <= tol)) {
                std::ostringstream os;
                os << id << "." << path << ": got " << got << ", want " << want << " +- " << tol;
                out.ok = false;
                out.mismatches.push_back(os.str());
            }
        }
    }
    return out;
}

int exit_code_for_verdict(const json& report) {
    if (!report.contains("verdict")) return Ok;
    const std::string v = report.at("verdict").get<std::string>();
    return v == "fail" ? VerificationFail : Ok;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

void write_trajectory_csv(const ProfileTrajectory& traj, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(traj, os);
}

void write_snapshot_csv(const PdeRun& run, std::size_t index, const std::string& path) {
    if (index >= run.snapshots.size()) throw std::out_of_range("snapshot index out of range");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "x,u\n";
    char buf[80];
    for (int i = 0; i < run.n_nodes; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", run.x_of(i), run.snapshots[index][i]);
        os << buf;
    }
}

} // namespace dhj::cli
