#pragma once

#include "dhj/exponents.hpp"
#include "dhj/ode_profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dhj {

/// Largest guaranteed slope bound for the backward problem: every
/// alpha in (0, backward_alpha0) produces a global, positive, increasing
/// profile with a single inflection.
double backward_alpha0(const ExponentContext& ctx);

struct BackwardShapeReport {
    bool phi_positive = false;
    bool phi_prime_positive = false;
    std::optional<double> r_bar; // unique phi'' upcross location
    int upcross_count = 0;
    PsiSeries psi;
    double psi_rel_err_vs_limit = 0.0;
    double z_tail_min = 0.0;   // min of phi'^{p-1}/y over the last decade
    double z_liminf_bound = 0.0; // 0.5*min(1,beta)
    bool z_check = false;
    bool shape_ok = false;
};

struct BackwardProfileResult {
    ProfileTrajectory trajectory;
    BackwardShapeReport report;
};

/// Integrates the backward profile for 0 < alpha < backward_alpha0 and
/// verifies the expected shape (positivity, single inflection, tail limit).
BackwardProfileResult backward_profile(const ExponentContext& ctx, double alpha,
                                       const IntegratorControls& c);

/// Slope threshold below which forward profiles are guaranteed to develop
/// phi'' < 0. Requires p > 2.
double forward_alpha1(const ExponentContext& ctx);

enum class ForwardTag { J1, J2, Undetermined };
const char* forward_tag_name(ForwardTag t);

struct ForwardClass {
    ForwardTag tag = ForwardTag::Undetermined;
    std::optional<double> witness_y;
    double y_reached = 0.0;
    std::string diagnostics;
};

/// Classifies a forward shooting slope: J1 on the first phi'' < 0 event,
/// J2 on the first phi'^{p-1} > y+1 event or blow-up guard, Undetermined
/// when y_max is reached with neither. First event in y wins.
ForwardClass classify_forward(const ExponentContext& ctx, double alpha,
                              const IntegratorControls& c);

struct CriticalAlphaResult {
    double alpha_star = 0.0;
    double lo = 0.0, hi = 0.0; // classify(lo)=J1, classify(hi)=J2
    int iterations = 0;
    double y_max_used = 0.0;
};

/// Bisects the J1/J2 boundary starting from [forward_alpha1, first J2 slope in
/// hi_start, 2 hi_start, ...]. Undetermined probes retry with doubled y_max up
/// to y_max_cap before failing.
CriticalAlphaResult critical_alpha(const ExponentContext& ctx, double tol,
                                   const IntegratorControls& c, double y_max_cap = 800.0,
                                   double hi_start = 1.0);

struct CriticalProfileReport {
    double alpha_used = 0.0;
    double bracket_width = 0.0;
    double horizon = 0.0; // y up to which the bracket trajectories agree within 1% in phi'
    double min_phi_minus_alpha_y = 0.0;
    double min_lower_gap = 0.0; // min of phi'^{p-1} - (beta/2) y
    double min_upper_gap = 0.0; // min of (y+1) - phi'^{p-1}
    double min_phi_pp = 0.0;
    double psi_at_horizon = 0.0;
    double psi_rel_err_vs_limit = 0.0;
    bool bounds_ok = false; // all three bound checks within slack
    double slack = 1e-3;
};

/// Integrates the bracket midpoint and checks the critical-profile bounds
/// phi >= alpha y and (beta/2) y <= phi'^{p-1} <= y+1 up to the horizon where
/// the two bracket trajectories stay within 1% of each other in phi'.
CriticalProfileReport critical_profile_report(const ExponentContext& ctx,
                                              const CriticalAlphaResult& bracket,
                                              const IntegratorControls& c);

struct ProfileOrderingReport {
    bool ordered = false;
    double min_phi_gap = 0.0;
    double min_phi_prime_gap = 0.0;
    double y_compared_to = 0.0;
};

/// Forward profiles are strictly ordered in alpha: phi and phi' of the larger
/// slope dominate at every y > 0 while both trajectories exist.
ProfileOrderingReport compare_profiles(const ExponentContext& ctx, double alpha_lo, double alpha_hi,
                                       const IntegratorControls& c);

} // namespace dhj
