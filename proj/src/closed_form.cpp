#include "dhj/closed_form.hpp"

#include <cmath>
#include <numeric>

namespace dhj {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(const std::vector<double>& a) { return dot(a, a); }

[[noreturn]] void domain_reject(const std::string& family, const std::string& why) {
    throw std::domain_error(family + ": point outside validity domain (" + why + ")");
}

void check_dim(const std::string& family, const SpaceTimePoint& pt, std::size_t n) {
    if (pt.x.size() != n) {
        throw std::invalid_argument(family + ": point has dimension " + std::to_string(pt.x.size()) +
                                    ", solution is " + std::to_string(n) + "-dimensional");
    }
}

} // namespace

double grad_norm(const EvalResult& e) { return std::sqrt(norm2(e.grad_u)); }

ClosedFormSolution ClosedFormSolution::traveling_wave(const ExponentContext& ctx,
                                                      std::vector<double> a) {
    if (a.empty() || norm2(a) == 0.0) {
        throw std::invalid_argument("traveling_wave: direction vector must be nonzero");
    }
    return ClosedFormSolution(ctx, TravelingWave{std::move(a)});
}

ClosedFormSolution ClosedFormSolution::stationary_half_line(const ExponentContext& ctx,
                                                            double offset) {
    if (ctx.p == 2.0) {
        throw std::invalid_argument("stationary_half_line: undefined at p = 2 (family is logarithmic)");
    }
    if (ctx.p > 2.0 ? !(offset >= 0.0) : !(offset > 0.0)) {
        throw std::invalid_argument("stationary_half_line: offset must be >= 0 (p > 2) or > 0 (p < 2)");
    }
    return ClosedFormSolution(ctx, StationaryHalfLine{offset});
}

ClosedFormSolution ClosedFormSolution::quadratic_sinh(const ExponentContext& ctx, double k,
                                                      std::vector<double> drift) {
    if (ctx.p != 2.0) throw std::invalid_argument("quadratic_sinh: requires p = 2");
    if (!(k > 0)) throw std::invalid_argument("quadratic_sinh: requires k > 0");
    return ClosedFormSolution(ctx, QuadraticSinh{k, std::move(drift)});
}

ClosedFormSolution ClosedFormSolution::quadratic_log_linear(const ExponentContext& ctx, double k) {
    if (ctx.p != 2.0) throw std::invalid_argument("quadratic_log_linear: requires p = 2");
    if (!(k > 0)) throw std::invalid_argument("quadratic_log_linear: requires k > 0");
    return ClosedFormSolution(ctx, QuadraticLogLinear{k});
}

ClosedFormSolution ClosedFormSolution::log_heat_kernel(const ExponentContext& ctx, int dim) {
    if (ctx.p != 2.0) throw std::invalid_argument("log_heat_kernel: requires p = 2");
    if (dim < 1) throw std::invalid_argument("log_heat_kernel: requires dim >= 1");
    return ClosedFormSolution(ctx, LogHeatKernel{dim});
}

ClosedFormSolution ClosedFormSolution::linear_optimality(const ExponentContext& ctx, double eps) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("linear_optimality: requires eps in (0,1)");
    return ClosedFormSolution(ctx, LinearOptimality{eps});
}

ClosedFormSolution ClosedFormSolution::self_similar(ProfileDirection direction,
                                                    std::shared_ptr<const ProfileTrajectory> profile) {
    if (!profile || profile->samples.empty()) {
        throw std::invalid_argument("self_similar: requires a non-empty profile trajectory");
    }
    const int want = direction == ProfileDirection::Backward ? +1 : -1;
    if (profile->ode.sigma != want) {
        throw std::invalid_argument("self_similar: trajectory direction does not match");
    }
    ExponentContext ctx = profile->ode.context;
    return ClosedFormSolution(ctx, SelfSimilar{direction, std::move(profile)});
}

int ClosedFormSolution::ambient_dim() const {
    struct V {
        const ClosedFormSolution* self;
        int operator()(const TravelingWave& f) const { return static_cast<int>(f.a.size()); }
        int operator()(const StationaryHalfLine&) const { return 1; }
        int operator()(const QuadraticSinh& f) const { return static_cast<int>(f.drift.size()) + 1; }
        int operator()(const QuadraticLogLinear&) const { return 1; }
        int operator()(const LogHeatKernel& f) const { return f.dim; }
        int operator()(const LinearOptimality&) const { return 1; }
        int operator()(const SelfSimilar&) const { return 1; }
        int operator()(const Rescaled& f) const { return f.base->ambient_dim(); }
    };
    return std::visit(V{this}, family_);
}

std::string ClosedFormSolution::family_name() const {
    struct V {
        std::string operator()(const TravelingWave&) const { return "traveling-wave"; }
        std::string operator()(const StationaryHalfLine&) const { return "stationary-half-line"; }
        std::string operator()(const QuadraticSinh&) const { return "quadratic-sinh"; }
        std::string operator()(const QuadraticLogLinear&) const { return "quadratic-log-linear"; }
        std::string operator()(const LogHeatKernel&) const { return "log-heat-kernel"; }
        std::string operator()(const LinearOptimality&) const { return "linear-optimality"; }
        std::string operator()(const SelfSimilar& f) const {
            return f.direction == ProfileDirection::Backward ? "self-similar-backward"
                                                             : "self-similar-forward";
        }
        std::string operator()(const Rescaled& f) const { return "rescaled:" + f.base->family_name(); }
    };
    return std::visit(V{}, family_);
}

double ClosedFormSolution::hamiltonian_sign() const {
    if (const auto* ss = get_if<SelfSimilar>()) {
        return ss->direction == ProfileDirection::Forward ? -1.0 : +1.0;
    }
    if (const auto* rs = get_if<Rescaled>()) return rs->base->hamiltonian_sign();
    return +1.0;
}

bool ClosedFormSolution::in_domain(const SpaceTimePoint& pt) const {
    if (pt.x.size() != static_cast<std::size_t>(ambient_dim())) return false;
    struct V {
        const ClosedFormSolution* self;
        const SpaceTimePoint& pt;
        bool operator()(const TravelingWave&) const { return true; }
        bool operator()(const StationaryHalfLine& f) const {
            return f.offset > 0.0 ? pt.x[0] >= 0.0 : pt.x[0] > 0.0;
        }
        bool operator()(const QuadraticSinh&) const { return pt.x.back() >= 0.0; }
        bool operator()(const QuadraticLogLinear&) const { return pt.x[0] >= 0.0; }
        bool operator()(const LogHeatKernel&) const { return pt.t > 0.0; }
        bool operator()(const LinearOptimality&) const { return true; }
        bool operator()(const SelfSimilar& f) const {
            if (f.direction == ProfileDirection::Backward) {
                if (!(pt.t < 0.0) || pt.x[0] < 0.0) return false;
                return f.profile->covers(pt.x[0] / std::sqrt(-pt.t));
            }
            if (!(pt.t > -1.0) || pt.x[0] < 0.0) return false;
            return f.profile->covers(pt.x[0] / std::sqrt(pt.t + 1.0));
        }
        bool operator()(const Rescaled& f) const {
            SpaceTimePoint mapped{pt.x, pt.t * f.lambda * f.lambda};
            for (auto& xi : mapped.x) xi *= f.lambda;
            return f.base->in_domain(mapped);
        }
    };
    return std::visit(V{this, pt}, family_);
}

EvalResult ClosedFormSolution::eval(const SpaceTimePoint& pt) const {
    check_dim(family_name(), pt, static_cast<std::size_t>(ambient_dim()));
    const double p = ctx_.p;
    const double beta = ctx_.beta;
    const double gamma = ctx_.gamma_ss;

    struct V {
        const ClosedFormSolution* self;
        const SpaceTimePoint& pt;
        double p, beta, gamma;

        EvalResult operator()(const TravelingWave& f) const {
            EvalResult e;
            const double ap = std::pow(std::sqrt(norm2(f.a)), p);
            e.u = ap * pt.t + dot(f.a, pt.x);
            e.grad_u = f.a;
            e.u_t = ap;
            e.laplacian_u = 0.0;
            return e;
        }

        EvalResult operator()(const StationaryHalfLine& f) const {
            const double x = pt.x[0];
            if (!(f.offset > 0.0 ? x >= 0.0 : x > 0.0)) {
                domain_reject("stationary-half-line", "requires x_n >= 0, and > 0 when offset = 0");
            }
            const double cp = *self->ctx_.c_p;
            const double z = x + f.offset;
            const double s = beta < 1.0 ? 1.0 : -1.0; // sign(1 - beta)
            EvalResult e;
            e.u = cp * s * (std::pow(z, 1.0 - beta) - std::pow(f.offset, 1.0 - beta));
            e.grad_u = {std::pow(beta, beta) * std::pow(z, -beta)};
            e.u_t = 0.0;
            e.laplacian_u = -std::pow(beta, beta + 1.0) * std::pow(z, -beta - 1.0);
            return e;
        }

        EvalResult operator()(const QuadraticSinh& f) const {
            const double xn = pt.x.back();
            if (xn < 0.0) domain_reject("quadratic-sinh", "requires x_n >= 0");
            const std::size_t n = pt.x.size();
            double w = 0.0, drift2 = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                w += f.drift[i] * pt.x[i];
                drift2 += f.drift[i] * f.drift[i];
            }
            const double rate = drift2 + f.k * f.k;
            const double E = std::exp(w + rate * pt.t);
            const double S = std::sinh(f.k * xn), C = std::cosh(f.k * xn);
            const double v = E * S;
            const double D = 1.0 + v;
            EvalResult e;
            e.u = std::log1p(v);
            e.grad_u.resize(n);
            double grad_v2 = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double vi = f.drift[i] * v;
                e.grad_u[i] = vi / D;
                grad_v2 += vi * vi;
            }
            const double vn = E * f.k * C;
            e.grad_u[n - 1] = vn / D;
            grad_v2 += vn * vn;
            e.u_t = rate * v / D;
            e.laplacian_u = rate * v / D - grad_v2 / (D * D);
            return e;
        }

        EvalResult operator()(const QuadraticLogLinear& f) const {
            const double x = pt.x[0];
            if (x < 0.0) domain_reject("quadratic-log-linear", "requires x_n >= 0");
            const double D = 1.0 + f.k * x;
            EvalResult e;
            e.u = std::log1p(f.k * x);
            e.grad_u = {f.k / D};
            e.u_t = 0.0;
            e.laplacian_u = -f.k * f.k / (D * D);
            return e;
        }

        EvalResult operator()(const LogHeatKernel& f) const {
            if (!(pt.t > 0.0)) domain_reject("log-heat-kernel", "requires t > 0");
            const double n = f.dim;
            const double t = pt.t;
            const double r2 = norm2(pt.x);
            EvalResult e;
            e.u = -0.5 * n * std::log(t) - r2 / (4.0 * t);
            e.grad_u.resize(pt.x.size());
            for (std::size_t i = 0; i < pt.x.size(); ++i) e.grad_u[i] = -pt.x[i] / (2.0 * t);
            e.u_t = -0.5 * n / t + r2 / (4.0 * t * t);
            e.laplacian_u = -0.5 * n / t;
            return e;
        }

        EvalResult operator()(const LinearOptimality& f) const {
            const double inv_eps = 1.0 / f.eps;
            EvalResult e;
            e.u = inv_eps * pt.x[0] + std::pow(inv_eps, p) * pt.t;
            e.grad_u = {inv_eps};
            e.u_t = std::pow(inv_eps, p);
            e.laplacian_u = 0.0;
            return e;
        }

        EvalResult operator()(const SelfSimilar& f) const {
            const double xn = pt.x[0];
            const bool backward = f.direction == ProfileDirection::Backward;
            const double tau = backward ? -pt.t : pt.t + 1.0;
            if (!(tau > 0.0) || xn < 0.0) {
                domain_reject(backward ? "self-similar-backward" : "self-similar-forward",
                              backward ? "requires t < 0 and x_n >= 0" : "requires t > -1 and x_n >= 0");
            }
            const double y = xn / std::sqrt(tau);
            if (!f.profile->covers(y)) {
                domain_reject("self-similar", "profile trajectory does not cover y=" + std::to_string(y));
            }
            const TrajectorySample s = f.profile->at(y);
            const double tg1 = std::pow(tau, gamma - 1.0);
            EvalResult e;
            e.u = std::pow(tau, gamma) * s.phi;
            e.grad_u = {std::pow(tau, gamma - 0.5) * s.phi_prime};
            e.u_t = backward ? tg1 * (0.5 * y * s.phi_prime - gamma * s.phi)
                             : tg1 * (gamma * s.phi - 0.5 * y * s.phi_prime);
            e.laplacian_u = tg1 * s.phi_pp;
            return e;
        }

        EvalResult operator()(const Rescaled& f) const {
            SpaceTimePoint mapped{pt.x, pt.t * f.lambda * f.lambda};
            for (auto& xi : mapped.x) xi *= f.lambda;
            EvalResult inner = f.base->eval(mapped);
            const double b = f.base->context().beta;
            const double u_scale = std::pow(f.lambda, b - 1.0);
            const double grad_scale = std::pow(f.lambda, b);
            const double second_scale = std::pow(f.lambda, b + 1.0);
            EvalResult e;
            e.u = u_scale * inner.u;
            e.grad_u = std::move(inner.grad_u);
            for (auto& g : e.grad_u) g *= grad_scale;
            e.u_t = second_scale * inner.u_t;
            e.laplacian_u = second_scale * inner.laplacian_u;
            return e;
        }
    };
    return std::visit(V{this, pt, p, beta, gamma}, family_);
}

double ClosedFormSolution::residual(const SpaceTimePoint& pt) const {
    const EvalResult e = eval(pt);
    return e.u_t - e.laplacian_u - hamiltonian_sign() * pow_abs(grad_norm(e), ctx_.p);
}

ClosedFormSolution ClosedFormSolution::rescaled(double lambda) const {
    if (!(lambda > 0)) throw std::invalid_argument("rescaled: requires lambda > 0");
    if (lambda == 1.0) return *this;
    if (const auto* rs = get_if<Rescaled>()) {
        return ClosedFormSolution(ctx_, Rescaled{rs->base, rs->lambda * lambda});
    }
    auto base = std::make_shared<const ClosedFormSolution>(*this);
    return ClosedFormSolution(ctx_, Rescaled{std::move(base), lambda});
}

} // namespace dhj
