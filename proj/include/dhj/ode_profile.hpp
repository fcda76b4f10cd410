#pragma once

#include "dhj/exponents.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace dhj {

/// The unified self-similar profile equation
///     sigma * phi'' = (1/2) y phi' - gamma phi - |phi'|^p
/// with sigma = +1 for the backward (ancient) profiles and sigma = -1 for the
/// forward profiles of the absorbing equation.
struct ProfileOde {
    ExponentContext context;
    int sigma = +1;
};

ProfileOde backward_ode(const ExponentContext& ctx);
ProfileOde forward_ode(const ExponentContext& ctx);

struct IntegratorControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.5;
    double y_max = 100.0;
    double phi_prime_cap = 1e8;
    double event_tol = 1e-9; // localization width in y

    void validate() const;
};

enum class EventKind { PhiPrimePrimeNegative, PhiPrimePrimeUpcross, J2Threshold, BlowUpGuard };
enum class Termination { ReachedYMax, BlowUpGuard, StepUnderflow };

const char* event_kind_name(EventKind k);
const char* termination_name(Termination t);

struct Event {
    EventKind kind;
    double y = 0.0;
};

struct TrajectorySample {
    double y = 0.0;
    double phi = 0.0;
    double phi_prime = 0.0;
    double phi_pp = 0.0; // always sigma*(y phi'/2 - gamma phi - |phi'|^p)
};

/// Sampled profile path. Samples sit at integrator steps plus a forced
/// uniform grid (spacing 0.1); y is strictly increasing from 0.
struct ProfileTrajectory {
    ProfileOde ode;
    double alpha = 0.0; // phi'(0)
    std::vector<TrajectorySample> samples;
    std::vector<Event> events;
    Termination termination = Termination::ReachedYMax;
    bool event_tie_warning = false; // two event kinds localized to the same y

    double y_end() const { return samples.empty() ? 0.0 : samples.back().y; }

    /// Cubic Hermite interpolation of (phi, phi') between samples; phi'' is
    /// recovered algebraically from the ODE, never by differencing.
    TrajectorySample at(double y) const;

    bool covers(double y) const { return y >= 0.0 && y <= y_end(); }
};

/// |x|^p as exp(p log|x|), with the removable singularity at x = 0 (p > 1).
double pow_abs(double x, double p);

/// Pure algebra: sigma*(y phi'/2 - gamma phi - |phi'|^p).
double second_derivative(const ProfileOde& ode, double y, double phi, double phi_prime);

/// Integrates from phi(0) = 0, phi'(0) = alpha with event detection.
/// Terminates at y_max, at the |phi'| blow-up guard, or on step underflow.
ProfileTrajectory integrate(const ProfileOde& ode, double alpha, const IntegratorControls& c);

struct PsiSeries {
    std::vector<std::pair<double, double>> series; // (y, phi/y^{beta+1}) on y >= 1
    double limit_estimate = 0.0;                   // psi_inf of the tail fit
    double tail_coefficient = 0.0;                 // c in psi = psi_inf + c y^{-q}
    double tail_exponent = 0.0;                    // fitted q (empirical, reported only)
    double fit_rms = 0.0;
};

/// Tail diagnostic psi(y) = phi/y^{beta+1} with a least-squares limit estimate
/// over the last decade of y. Requires y_end >= 10.
PsiSeries psi_ratio(const ProfileTrajectory& traj);

/// CSV dump, header "y,phi,phi_prime,phi_pp", events as footer comments.
void write_csv(const ProfileTrajectory& traj, std::ostream& os);

} // namespace dhj
