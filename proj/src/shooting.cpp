#include "dhj/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dhj {

double backward_alpha0(const ExponentContext& ctx) {
    const double gamma_bar = std::max(ctx.gamma_ss, 0.0);
    const double eps = 0.5 - gamma_bar;
    return std::pow(0.5 * eps, ctx.beta);
}

const char* forward_tag_name(ForwardTag t) {
    switch (t) {
        case ForwardTag::J1: return "J1";
        case ForwardTag::J2: return "J2";
        case ForwardTag::Undetermined: return "undetermined";
    }
    return "unknown";
}

BackwardProfileResult backward_profile(const ExponentContext& ctx, double alpha,
                                       const IntegratorControls& c) {
    const double alpha0 = backward_alpha0(ctx);
    if (!(alpha > 0.0 && alpha < alpha0)) {
        throw std::invalid_argument("backward_profile: alpha must lie in (0, " +
                                    std::to_string(alpha0) + "), got " + std::to_string(alpha));
    }
    BackwardProfileResult out;
    out.trajectory = integrate(backward_ode(ctx), alpha, c);

    BackwardShapeReport& r = out.report;
    r.phi_positive = true;
    r.phi_prime_positive = true;
    for (const auto& s : out.trajectory.samples) {
        if (s.y > 0.0 && !(s.phi > 0.0)) r.phi_positive = false;
        if (s.y > 0.0 && !(s.phi_prime > 0.0)) r.phi_prime_positive = false;
    }
    for (const auto& e : out.trajectory.events) {
        if (e.kind == EventKind::PhiPrimePrimeUpcross) {
            ++r.upcross_count;
            if (!r.r_bar) r.r_bar = e.y;
        }
    }

    if (out.trajectory.y_end() >= 10.0) {
        r.psi = psi_ratio(out.trajectory);
        r.psi_rel_err_vs_limit = std::abs(r.psi.limit_estimate - ctx.L_limit) / ctx.L_limit;
    }

    r.z_liminf_bound = 0.5 * std::min(1.0, ctx.beta);
    const double y_end = out.trajectory.y_end();
    double z_min = std::numeric_limits<double>::infinity();
    for (const auto& s : out.trajectory.samples) {
        if (s.y >= std::max(1.0, y_end / 10.0)) {
            z_min = std::min(z_min, pow_abs(s.phi_prime, ctx.p - 1.0) / s.y);
        }
    }
    r.z_tail_min = z_min;
    r.z_check = z_min >= r.z_liminf_bound * 0.95;

    r.shape_ok = r.phi_positive && r.phi_prime_positive && r.upcross_count == 1 &&
                 out.trajectory.termination == Termination::ReachedYMax;
    return out;
}

double forward_alpha1(const ExponentContext& ctx) {
    if (!(ctx.p > 2.0)) {
        throw std::invalid_argument("forward_alpha1: requires p > 2");
    }
    const double eps = 1.0 / (2.0 * (ctx.p - 2.0));
    const double alpha2 = std::pow(1.0 + eps, -ctx.p * ctx.beta);
    const double y1 = std::min(1.0, eps / (ctx.gamma_ss * (1.0 + eps) + 1.0));
    const double cand = std::pow(0.125 * ctx.beta * y1 * std::pow(1.0 + eps, -ctx.p), ctx.beta);
    return std::min(alpha2, cand);
}

ForwardClass classify_forward(const ExponentContext& ctx, double alpha,
                              const IntegratorControls& c) {
    if (!(ctx.p > 2.0)) throw std::invalid_argument("classify_forward: requires p > 2");
    if (!(alpha > 0.0)) throw std::invalid_argument("classify_forward: requires alpha > 0");

    ForwardClass out;
    ProfileTrajectory traj;
    try {
        traj = integrate(forward_ode(ctx), alpha, c);
    } catch (const std::exception& ex) {
        out.diagnostics = std::string("integrator failure: ") + ex.what();
        return out;
    }
    out.y_reached = traj.y_end();
    if (traj.termination == Termination::StepUnderflow) {
        out.diagnostics = "step underflow at y=" + std::to_string(traj.y_end());
    }

    // first decisive event in y wins
    for (const auto& e : traj.events) {
        if (e.kind == EventKind::PhiPrimePrimeNegative) {
            out.tag = ForwardTag::J1;
            out.witness_y = e.y;
            break;
        }
        if (e.kind == EventKind::J2Threshold || e.kind == EventKind::BlowUpGuard) {
            out.tag = ForwardTag::J2;
            out.witness_y = e.y;
            break;
        }
    }
    if (traj.event_tie_warning) {
        out.diagnostics += (out.diagnostics.empty() ? "" : "; ");
        out.diagnostics += "two event kinds localized to the same y, first-in-y kept";
    }
    return out;
}

namespace {

// classify with horizon refinement: Undetermined retries with doubled y_max
ForwardClass classify_refining(const ExponentContext& ctx, double alpha, IntegratorControls c,
                               double y_max_cap, double& y_max_used) {
    while (true) {
        ForwardClass fc = classify_forward(ctx, alpha, c);
        y_max_used = std::max(y_max_used, c.y_max);
        if (fc.tag != ForwardTag::Undetermined || c.y_max >= y_max_cap) return fc;
        c.y_max = std::min(2.0 * c.y_max, y_max_cap);
    }
}

} // namespace

CriticalAlphaResult critical_alpha(const ExponentContext& ctx, double tol,
                                   const IntegratorControls& c, double y_max_cap, double hi_start) {
    if (!(tol > 0)) throw std::invalid_argument("critical_alpha: requires tol > 0");
    if (!(hi_start > 0)) throw std::invalid_argument("critical_alpha: requires hi_start > 0");
    CriticalAlphaResult res;

    double lo = forward_alpha1(ctx);
    ForwardClass lo_class = classify_refining(ctx, lo, c, y_max_cap, res.y_max_used);
    if (lo_class.tag != ForwardTag::J1) {
        throw std::runtime_error("critical_alpha: guaranteed-J1 slope " + std::to_string(lo) +
                                 " classified as " + forward_tag_name(lo_class.tag) +
                                 " (y_max cap " + std::to_string(y_max_cap) + ")");
    }

    double hi = std::max(hi_start, lo * 1.0000001);
    while (true) {
        ForwardClass hi_class = classify_refining(ctx, hi, c, y_max_cap, res.y_max_used);
        if (hi_class.tag == ForwardTag::J2) break;
        if (hi_class.tag == ForwardTag::J1) {
            lo = hi; // larger verified-J1 slope tightens the bracket
        } else {
            throw std::runtime_error("critical_alpha: slope " + std::to_string(hi) +
                                     " undetermined at y_max cap; " + hi_class.diagnostics);
        }
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("critical_alpha: no J2 slope found up to 1e6");
    }

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // double-precision floor
        ForwardClass mc = classify_refining(ctx, mid, c, y_max_cap, res.y_max_used);
        ++res.iterations;
        if (mc.tag == ForwardTag::J1) {
            lo = mid;
        } else if (mc.tag == ForwardTag::J2) {
            hi = mid;
        } else {
            throw std::runtime_error("critical_alpha: alpha=" + std::to_string(mid) +
                                     " undetermined at y_max cap " + std::to_string(y_max_cap) +
                                     "; " + mc.diagnostics);
        }
    }
    res.lo = lo;
    res.hi = hi;
    res.alpha_star = 0.5 * (lo + hi);
    return res;
}

CriticalProfileReport critical_profile_report(const ExponentContext& ctx,
                                              const CriticalAlphaResult& bracket,
                                              const IntegratorControls& c) {
    CriticalProfileReport rep;
    rep.alpha_used = 0.5 * (bracket.lo + bracket.hi);
    rep.bracket_width = bracket.hi - bracket.lo;

    const ProfileTrajectory t_lo = integrate(forward_ode(ctx), bracket.lo, c);
    const ProfileTrajectory t_hi = integrate(forward_ode(ctx), bracket.hi, c);
    const ProfileTrajectory t_mid = integrate(forward_ode(ctx), rep.alpha_used, c);

    // horizon: last shared grid y with |phi'_hi - phi'_lo| < 1% of phi'_lo
    const double y_shared = std::min({t_lo.y_end(), t_hi.y_end(), t_mid.y_end()});
    double horizon = 0.0;
    for (double y = 0.1; y <= y_shared + 1e-12; y += 0.1) {
        const double g_lo = t_lo.at(std::min(y, y_shared)).phi_prime;
        const double g_hi = t_hi.at(std::min(y, y_shared)).phi_prime;
        if (std::abs(g_hi - g_lo) >= 0.01 * std::abs(g_lo)) break;
        horizon = y;
    }
    rep.horizon = horizon;

    double min_asym = std::numeric_limits<double>::infinity();
    double min_lower = std::numeric_limits<double>::infinity();
    double min_upper = std::numeric_limits<double>::infinity();
    double min_pp = std::numeric_limits<double>::infinity();
    for (const auto& s : t_mid.samples) {
        if (s.y > horizon) break;
        const double zp = pow_abs(s.phi_prime, ctx.p - 1.0);
        min_asym = std::min(min_asym, s.phi - rep.alpha_used * s.y);
        min_lower = std::min(min_lower, zp - 0.5 * ctx.beta * s.y);
        min_upper = std::min(min_upper, (s.y + 1.0) - zp);
        min_pp = std::min(min_pp, s.phi_pp);
    }
    rep.min_phi_minus_alpha_y = min_asym;
    rep.min_lower_gap = min_lower;
    rep.min_upper_gap = min_upper;
    rep.min_phi_pp = min_pp;
    rep.bounds_ok = min_asym >= -rep.slack && min_lower >= -rep.slack && min_upper >= -rep.slack &&
                    min_pp >= -rep.slack;

    if (horizon > 0.0) {
        const TrajectorySample sh = t_mid.at(horizon);
        rep.psi_at_horizon = sh.phi / std::pow(horizon, ctx.beta + 1.0);
        rep.psi_rel_err_vs_limit = std::abs(rep.psi_at_horizon - ctx.L_limit) / ctx.L_limit;
    }
    return rep;
}

ProfileOrderingReport compare_profiles(const ExponentContext& ctx, double alpha_lo, double alpha_hi,
                                       const IntegratorControls& c) {
    if (!(ctx.p > 2.0)) throw std::invalid_argument("compare_profiles: requires p > 2");
    if (!(0.0 < alpha_lo && alpha_lo < alpha_hi)) {
        throw std::invalid_argument("compare_profiles: requires 0 < alpha_lo < alpha_hi");
    }
    const ProfileTrajectory t_lo = integrate(forward_ode(ctx), alpha_lo, c);
    const ProfileTrajectory t_hi = integrate(forward_ode(ctx), alpha_hi, c);

    ProfileOrderingReport rep;
    rep.y_compared_to = std::min(t_lo.y_end(), t_hi.y_end());
    rep.ordered = true;
    rep.min_phi_gap = std::numeric_limits<double>::infinity();
    rep.min_phi_prime_gap = std::numeric_limits<double>::infinity();
    for (double y = 0.1; y <= rep.y_compared_to + 1e-12; y += 0.1) {
        const double yy = std::min(y, rep.y_compared_to);
        const auto a = t_lo.at(yy);
        const auto b = t_hi.at(yy);
        rep.min_phi_gap = std::min(rep.min_phi_gap, b.phi - a.phi);
        rep.min_phi_prime_gap = std::min(rep.min_phi_prime_gap, b.phi_prime - a.phi_prime);
        if (!(b.phi > a.phi && b.phi_prime > a.phi_prime)) rep.ordered = false;
    }
    return rep;
}

} // namespace dhj
