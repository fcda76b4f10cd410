#pragma once

#include "dhj/closed_form.hpp"
#include "dhj/pde_solver.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dhj {

enum class Verdict { Pass, Fail, ReportOnly };
const char* verdict_name(Verdict v);

struct EstimateReport {
    std::string id;
    double sup_ratio = 0.0;
    SpaceTimePoint argmax;
    long samples = 0;
    std::vector<std::pair<double, double>> scale_table; // (lambda, sup_ratio), when swept
    Verdict verdict = Verdict::ReportOnly;
    std::string notes;
    std::vector<std::pair<std::string, double>> values; // checker-specific numbers, stable order
};

/// Uniform access to u, ∇u, u_t, Δu over either a closed-form solution, a
/// finite-difference run (via the solver's discrete operators and bilinear
/// interpolation), or a test-supplied callable.
class SolutionSource {
public:
    explicit SolutionSource(ClosedFormSolution s);
    explicit SolutionSource(std::shared_ptr<const PdeRun> run);
    SolutionSource(std::function<EvalResult(const SpaceTimePoint&)> fn, int dim, double p);

    EvalResult eval(const SpaceTimePoint& pt) const;
    bool in_domain(const SpaceTimePoint& pt) const;
    int ambient_dim() const { return dim_; }
    double p() const { return p_; }
    const ClosedFormSolution* closed_form() const { return closed_.get(); }
    const PdeRun* pde_run() const { return run_.get(); }

    /// Exact rescaling; closed forms only.
    SolutionSource rescaled(double lambda) const;

private:
    std::shared_ptr<const ClosedFormSolution> closed_;
    std::shared_ptr<const PdeRun> run_;
    std::vector<std::vector<double>> run_grad_, run_ut_;
    std::function<EvalResult(const SpaceTimePoint&)> fn_;
    int dim_ = 1;
    double p_ = 2.0;
};

struct GridOptions {
    int nx = 41; // per-axis space samples (endpoints included)
    int nt = 25; // log-spaced time samples
    double t_floor_factor = 1e-6; // t >= factor * T
};

/// sup over B_{R/2}(center) x (0,T] of |∇u| / {(M-u)/R + ((M-u)/(R^2 ∧ t))^{1/p}}
/// with M the sampled supremum of u over B_R(center) x (0,T].
EstimateReport bernstein_ratio(const SolutionSource& src, const std::vector<double>& center,
                               double R, double T, const GridOptions& opts = {});

/// sup over B_{R/2} x (0,T) of (a|∇u|^p - u_t)_+ / (R^{-β-1} + R^{1-β} t^{-1}).
/// Requires p >= 2; a in [0,1) for p > 2, a in [0,1] for p = 2.
EstimateReport li_yau_pointwise_ratio(const SolutionSource& src, const std::vector<double>& center,
                                      double R, double a, double T, const GridOptions& opts = {});

/// Smallest (C1,C2) on a grid so that u(x,t) <= u(y,s) + C1 (|y-x|^p/(s-t))^β
/// + C2 (R^{-β-1}+R^{1-β}t^{-1})(s-t) over all sampled pairs with t < s.
/// Requires p > 2. Also reports the joint single-constant fit.
EstimateReport li_yau_two_point(const SolutionSource& src, const std::vector<double>& center,
                                double R, double T, const GridOptions& opts = {});

using CylinderChecker = std::function<EstimateReport(
    const SolutionSource&, const std::vector<double>& center, double R, double T)>;

/// Runs a cylinder checker on rescaled instances with (R,T) mapped to
/// (R/λ, T/λ²); fills the scale table and verdicts the relative spread.
/// Closed forms rescale exactly; finite-difference sources re-solve through
/// the source_at_lambda factory.
EstimateReport scale_stability(const CylinderChecker& checker,
                               const std::function<SolutionSource(double)>& source_at_lambda,
                               const std::vector<double>& center, double R, double T,
                               const std::vector<double>& lambdas, double spread_tol);

EstimateReport scale_stability(const CylinderChecker& checker, const SolutionSource& src,
                               const std::vector<double>& center, double R, double T,
                               const std::vector<double>& lambdas, double spread_tol);

struct HalfspaceGridOptions {
    double x_min = 0.01, x_max = 2.0;
    int nx = 25;
    double t_min = 1e-4, t_max = 1.0; // |t| range
    int nt = 13;
    double y_fit_min = 50.0; // similarity variable window for the tail fits
};

/// On a backward self-similar solution: sup of u/(x^{1-β}+x^{1+β}|t|^{-β}) and
/// |u_x|/(x^{-β}+x^{β}|t|^{-β}) over a log-spaced (x,|t|) grid, plus log-log
/// slope and amplitude fits of u ~ L |t|^{-β} x^{1+β} at the smallest |t|.
EstimateReport halfspace_growth_ratio(const SolutionSource& src,
                                      const HalfspaceGridOptions& opts = {});

struct FailureProbeOptions {
    double r_big = 8.0;
    double h = 1.0 / 64;
    double t_probe = 0.01;
    int snapshots = 12;
    double margin = 0.0; // pass requires u_t(0,t) < -margin on (0, t_probe]
};

/// For 1 < p < 2: radial run with u0 = e^{-r^2}; reports u_t(0,t) on
/// (0, t_probe]. A strictly negative result rules out any estimate forcing
/// u_t >= 0 in the R -> infinity limit.
EstimateReport li_yau_failure_probe(const ExponentContext& ctx, int dim,
                                    const FailureProbeOptions& opts = {});

/// For p > 2 and a J1 slope: finds the smallest λ > 1 with φ''(λ) < 0 < φ'(λ)
/// on the forward profile and evaluates L(a,λ) = (a-1)|φ'(λ)|^p - φ''(λ);
/// Pass when L(a,λ) > 0.
EstimateReport li_yau_optimality_probe(const ExponentContext& ctx, double alpha, double a,
                                       const IntegratorControls& controls);

enum class InequalityDirection { BlowUp, Decay };

struct OdeBoundCheckOptions {
    double y_guard = 1e8;
    int forced_samples = 512;
};

/// Integrates the equality ODE Y' = ±(k|Y|^γ - A) and reports the normalized
/// quantity Y(t)·[k(t1-t)]^{1/(γ-1)} (BlowUp; t1 clamped to the detected
/// blow-up time) or Y(t)·[k(t-t0)]^{1/(γ-1)} (Decay), which must stay bounded.
EstimateReport ode_inequality_bound_check(double gamma, double k, double A,
                                          InequalityDirection direction, double t0, double t1,
                                          double y0, const OdeBoundCheckOptions& opts = {});

} // namespace dhj
