#pragma once

#include "dhj/exponents.hpp"
#include "dhj/ode_profile.hpp"

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace dhj {

struct SpaceTimePoint {
    std::vector<double> x;
    double t = 0.0;
};

struct EvalResult {
    double u = 0.0;
    std::vector<double> grad_u;
    double u_t = 0.0;
    double laplacian_u = 0.0;
};

double grad_norm(const EvalResult& e);

enum class ProfileDirection { Backward, Forward };

/// Catalog of explicit solutions with hand-coded derivatives.
///
/// Every family solves u_t - Δu = |∇u|^p on its validity domain, except the
/// forward self-similar family which solves the absorbing equation
/// v_t - Δv + |∇v|^p = 0 (see hamiltonian_sign). Points outside the validity
/// domain are rejected, never extrapolated.
class ClosedFormSolution {
public:
    struct TravelingWave {
        std::vector<double> a; // nonzero
    };
    struct StationaryHalfLine {
        double offset = 0.0; // >= 0 for p > 2, > 0 for p < 2
    };
    struct QuadraticSinh { // p = 2 only
        double k = 1.0;
        std::vector<double> drift; // a' of length n-1, may be empty
    };
    struct QuadraticLogLinear { // p = 2 only
        double k = 1.0;
    };
    struct LogHeatKernel { // p = 2 only
        int dim = 1;
    };
    struct LinearOptimality {
        double eps = 0.5; // in (0,1)
    };
    struct SelfSimilar {
        ProfileDirection direction = ProfileDirection::Backward;
        std::shared_ptr<const ProfileTrajectory> profile;
    };
    struct Rescaled {
        std::shared_ptr<const ClosedFormSolution> base;
        double lambda = 1.0;
    };

    static ClosedFormSolution traveling_wave(const ExponentContext& ctx, std::vector<double> a);
    static ClosedFormSolution stationary_half_line(const ExponentContext& ctx, double offset);
    static ClosedFormSolution quadratic_sinh(const ExponentContext& ctx, double k,
                                             std::vector<double> drift);
    static ClosedFormSolution quadratic_log_linear(const ExponentContext& ctx, double k);
    static ClosedFormSolution log_heat_kernel(const ExponentContext& ctx, int dim);
    static ClosedFormSolution linear_optimality(const ExponentContext& ctx, double eps);
    static ClosedFormSolution self_similar(ProfileDirection direction,
                                           std::shared_ptr<const ProfileTrajectory> profile);

    const ExponentContext& context() const { return ctx_; }
    int ambient_dim() const;
    std::string family_name() const;

    bool in_domain(const SpaceTimePoint& pt) const;

    /// Closed-form u, ∇u, u_t, Δu. Throws std::domain_error outside the
    /// validity domain (including profile coverage for self-similar families).
    EvalResult eval(const SpaceTimePoint& pt) const;

    /// Residual of the governing equation, u_t - Δu - s·|∇u|^p with
    /// s = hamiltonian_sign().
    double residual(const SpaceTimePoint& pt) const;

    /// +1 for u_t - Δu = |∇u|^p, -1 for the absorbing forward family.
    double hamiltonian_sign() const;

    /// The map u ↦ λ^{β-1} u(λx, λ²t), realized as a pointwise wrapper.
    ClosedFormSolution rescaled(double lambda) const;

    template <typename T>
    const T* get_if() const {
        return std::get_if<T>(&family_);
    }

private:
    using Family = std::variant<TravelingWave, StationaryHalfLine, QuadraticSinh,
                                QuadraticLogLinear, LogHeatKernel, LinearOptimality, SelfSimilar,
                                Rescaled>;
    ClosedFormSolution(ExponentContext ctx, Family f) : ctx_(std::move(ctx)), family_(std::move(f)) {}

    ExponentContext ctx_;
    Family family_;
};

} // namespace dhj
