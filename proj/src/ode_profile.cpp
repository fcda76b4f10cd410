#include "dhj/ode_profile.hpp"

#include "dhj/rk45.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <tuple>

namespace dhj {

namespace {

constexpr double kForcedSpacing = 0.1;

double event_dead_band(double phi_prime, double p) {
    return 1e-10 * (1.0 + pow_abs(phi_prime, p));
}

} // namespace

ProfileOde backward_ode(const ExponentContext& ctx) { return ProfileOde{ctx, +1}; }
ProfileOde forward_ode(const ExponentContext& ctx) { return ProfileOde{ctx, -1}; }

void IntegratorControls::validate() const {
    if (!(rel_tol >= 1e-13)) throw std::invalid_argument("IntegratorControls: rel_tol must be >= 1e-13");
    if (!(abs_tol > 0 && max_step > 0 && y_max > 0 && phi_prime_cap > 0 && event_tol > 0)) {
        throw std::invalid_argument("IntegratorControls: all fields must be positive");
    }
}

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::PhiPrimePrimeNegative: return "phi_pp_negative";
        case EventKind::PhiPrimePrimeUpcross: return "phi_pp_upcross";
        case EventKind::J2Threshold: return "j2_threshold";
        case EventKind::BlowUpGuard: return "blow_up_guard";
    }
    return "unknown";
}

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::ReachedYMax: return "reached_y_max";
        case Termination::BlowUpGuard: return "blow_up_guard";
        case Termination::StepUnderflow: return "step_underflow";
    }
    return "unknown";
}

double pow_abs(double x, double p) {
    if (x == 0.0) return 0.0;
    return std::exp(p * std::log(std::abs(x)));
}

double second_derivative(const ProfileOde& ode, double y, double phi, double phi_prime) {
    const double rhs = 0.5 * y * phi_prime - ode.context.gamma_ss * phi - pow_abs(phi_prime, ode.context.p);
    return ode.sigma > 0 ? rhs : -rhs;
}

TrajectorySample ProfileTrajectory::at(double y) const {
    if (samples.empty() || y < 0.0 || y > y_end() * (1.0 + 1e-12)) {
        throw std::domain_error("ProfileTrajectory::at: y=" + std::to_string(y) +
                                " outside covered range [0, " + std::to_string(y_end()) + "]");
    }
    y = std::min(y, y_end());
    auto it = std::lower_bound(samples.begin(), samples.end(), y,
                               [](const TrajectorySample& s, double v) { return s.y < v; });
    if (it != samples.end() && it->y == y) return *it;
    const TrajectorySample& b = *it;
    const TrajectorySample& a = *(it - 1);
    const double h = b.y - a.y;
    const double s = (y - a.y) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    TrajectorySample out;
    out.y = y;
    out.phi = h00 * a.phi + h10 * h * a.phi_prime + h01 * b.phi + h11 * h * b.phi_prime;
    out.phi_prime = h00 * a.phi_prime + h10 * h * a.phi_pp + h01 * b.phi_prime + h11 * h * b.phi_pp;
    out.phi_pp = second_derivative(ode, y, out.phi, out.phi_prime);
    return out;
}

namespace {

struct EventScanner {
    const ProfileOde& ode;
    const IntegratorControls& controls;
    ProfileTrajectory& traj;

    // sign states; phi'' starts at -sigma*alpha^p, J2 predicate may fire at y=0
    bool phi_pp_negative = false;
    bool j2_above = false;

    double phi_pp_of(const RkStep<2>& st, double y) const {
        auto v = st.eval(y);
        return second_derivative(ode, y, v[0], v[1]);
    }

    double j2_gap(const RkStep<2>& st, double y) const {
        auto v = st.eval(y);
        return pow_abs(v[1], ode.context.p - 1.0) - (y + 1.0);
    }

    template <typename F>
    double locate_zero(F&& f, double lo, double hi) const {
        double flo = f(lo);
        for (int i = 0; i < 200 && hi - lo > controls.event_tol; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if ((fm > 0) == (flo > 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    void record(EventKind kind, double y) {
        if (!traj.events.empty() && std::abs(traj.events.back().y - y) <= controls.event_tol &&
            traj.events.back().kind != kind) {
            traj.event_tie_warning = true;
        }
        traj.events.push_back(Event{kind, y});
    }

    // Scans one accepted step at the given check points (ascending, within the
    // step) and localizes any predicate transitions by bisection.
    void scan(const RkStep<2>& st, const std::vector<double>& checks) {
        double prev_y = st.t0;
        for (double y : checks) {
            const double pp = phi_pp_of(st, y);
            const double band = event_dead_band(st.eval(y)[1], ode.context.p);
            if (!phi_pp_negative && pp < -band) {
                record(EventKind::PhiPrimePrimeNegative,
                       locate_zero([&](double z) { return phi_pp_of(st, z); }, prev_y, y));
                phi_pp_negative = true;
            } else if (phi_pp_negative && pp > band) {
                record(EventKind::PhiPrimePrimeUpcross,
                       locate_zero([&](double z) { return phi_pp_of(st, z); }, prev_y, y));
                phi_pp_negative = false;
            }
            const double gap = j2_gap(st, y);
            if (!j2_above && gap > band) {
                record(EventKind::J2Threshold,
                       locate_zero([&](double z) { return j2_gap(st, z); }, prev_y, y));
                j2_above = true;
            } else if (j2_above && gap < -band) {
                j2_above = false;
            }
            prev_y = y;
        }
    }
};

} // namespace

ProfileTrajectory integrate(const ProfileOde& ode, double alpha, const IntegratorControls& c) {
    c.validate();
    if (!(alpha > 0)) throw std::invalid_argument("integrate: requires alpha > 0");

    ProfileTrajectory traj;
    traj.ode = ode;
    traj.alpha = alpha;

    const double p = ode.context.p;
    auto rhs = [&](double y, const std::array<double, 2>& v) {
        return std::array<double, 2>{v[1], second_derivative(ode, y, v[0], v[1])};
    };

    traj.samples.push_back({0.0, 0.0, alpha, second_derivative(ode, 0.0, 0.0, alpha)});

    EventScanner scanner{ode, c, traj};
    scanner.phi_pp_negative = traj.samples.front().phi_pp < 0.0;
    scanner.j2_above = pow_abs(alpha, p - 1.0) > 1.0 + event_dead_band(alpha, p);
    if (scanner.j2_above) scanner.record(EventKind::J2Threshold, 0.0);

    auto push_sample = [&](double y, double phi, double phi_prime) {
        if (!traj.samples.empty() && y <= traj.samples.back().y) return;
        traj.samples.push_back({y, phi, phi_prime, second_derivative(ode, y, phi, phi_prime)});
    };

    Rk45Options opt;
    opt.rel_tol = c.rel_tol;
    opt.abs_tol = c.abs_tol;
    opt.max_step = c.max_step;

    bool guard_hit = false;
    auto observer = [&](const RkStep<2>& st) -> bool {
        // check points: forced grid inside the step, midpoint, step end
        std::vector<double> checks;
        const double first_grid = (std::floor(st.t0 / kForcedSpacing) + 1.0) * kForcedSpacing;
        for (double g = first_grid; g < st.t1 - 1e-14; g += kForcedSpacing) {
            if (g > st.t0) checks.push_back(g);
        }
        checks.push_back(0.5 * (st.t0 + st.t1));
        checks.push_back(st.t1);
        std::sort(checks.begin(), checks.end());
        checks.erase(std::unique(checks.begin(), checks.end()), checks.end());

        // blow-up guard: truncate the step at the cap crossing
        if (std::abs(st.y1[1]) > c.phi_prime_cap) {
            const double y_cap = scanner.locate_zero(
                [&](double z) { return std::abs(st.eval(z)[1]) - c.phi_prime_cap; }, st.t0, st.t1);
            std::vector<double> pre;
            for (double g : checks) {
                if (g < y_cap) pre.push_back(g);
            }
            scanner.scan(st, pre);
            for (double g : pre) {
                auto v = st.eval(g);
                push_sample(g, v[0], v[1]);
            }
            auto v = st.eval(y_cap);
            push_sample(y_cap, v[0], v[1]);
            scanner.record(EventKind::BlowUpGuard, y_cap);
            guard_hit = true;
            return false;
        }

        scanner.scan(st, checks);
        for (double g : checks) {
            if (g == st.t1) continue;
            auto v = st.eval(g);
            push_sample(g, v[0], v[1]);
        }
        push_sample(st.t1, st.y1[0], st.y1[1]);
        return true;
    };

    const RkTermination rk = integrate_dopri5<2>(rhs, 0.0, {0.0, alpha}, c.y_max, opt, observer);
    switch (rk) {
        case RkTermination::ReachedEnd: traj.termination = Termination::ReachedYMax; break;
        case RkTermination::ObserverStop:
            traj.termination = guard_hit ? Termination::BlowUpGuard : Termination::ReachedYMax;
            break;
        case RkTermination::StepUnderflow: traj.termination = Termination::StepUnderflow; break;
    }
    std::sort(traj.events.begin(), traj.events.end(),
              [](const Event& a, const Event& b) { return a.y < b.y; });
    return traj;
}

PsiSeries psi_ratio(const ProfileTrajectory& traj) {
    const double y_end = traj.y_end();
    if (y_end < 10.0) {
        throw std::domain_error("psi_ratio: trajectory must reach y >= 10, got y_end=" +
                                std::to_string(y_end));
    }
    const double exponent = traj.ode.context.beta + 1.0;
    PsiSeries out;
    for (const auto& s : traj.samples) {
        if (s.y >= 1.0) out.series.emplace_back(s.y, s.phi / std::pow(s.y, exponent));
    }

    // least-squares psi = psi_inf + c y^{-q} over the last decade, q scanned
    const double y_lo = y_end / 10.0;
    std::vector<std::pair<double, double>> tail;
    for (const auto& [y, psi] : out.series) {
        if (y >= y_lo) tail.emplace_back(y, psi);
    }

    auto fit_for = [&](double q) {
        // linear LSQ in (psi_inf, c) against basis {1, y^-q}
        double s11 = 0, s1b = 0, sbb = 0, s1p = 0, sbp = 0;
        for (const auto& [y, psi] : tail) {
            const double b = std::pow(y, -q);
            s11 += 1.0;
            s1b += b;
            sbb += b * b;
            s1p += psi;
            sbp += b * psi;
        }
        const double det = s11 * sbb - s1b * s1b;
        double psi_inf, cc;
        if (std::abs(det) < 1e-300) {
            psi_inf = s1p / s11;
            cc = 0.0;
        } else {
            psi_inf = (sbb * s1p - s1b * sbp) / det;
            cc = (s11 * sbp - s1b * s1p) / det;
        }
        double sse = 0;
        for (const auto& [y, psi] : tail) {
            const double r = psi - (psi_inf + cc * std::pow(y, -q));
            sse += r * r;
        }
        return std::tuple<double, double, double>{sse, psi_inf, cc};
    };

    double best_q = 1.0, best_sse = std::numeric_limits<double>::infinity();
    double best_psi = 0.0, best_c = 0.0;
    for (double q = 0.25; q <= 4.0 + 1e-9; q += 0.25) {
        auto [sse, psi_inf, cc] = fit_for(q);
        if (sse < best_sse) {
            best_sse = sse;
            best_q = q;
            best_psi = psi_inf;
            best_c = cc;
        }
    }
    // local refinement around the best grid point
    for (double dq = 0.125; dq > 1e-3; dq *= 0.5) {
        for (double q : {best_q - dq, best_q + dq}) {
            if (q <= 0.01) continue;
            auto [sse, psi_inf, cc] = fit_for(q);
            if (sse < best_sse) {
                best_sse = sse;
                best_q = q;
                best_psi = psi_inf;
                best_c = cc;
            }
        }
    }
    out.limit_estimate = best_psi;
    out.tail_coefficient = best_c;
    out.tail_exponent = best_q;
    out.fit_rms = tail.empty() ? 0.0 : std::sqrt(best_sse / tail.size());
    return out;
}

void write_csv(const ProfileTrajectory& traj, std::ostream& os) {
    os << "y,phi,phi_prime,phi_pp\n";
    char buf[160];
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", s.y, s.phi, s.phi_prime, s.phi_pp);
        os << buf;
    }
    for (const auto& e : traj.events) {
        std::snprintf(buf, sizeof(buf), "# event,%s,%.17g\n", event_kind_name(e.kind), e.y);
        os << buf;
    }
}

} // namespace dhj
