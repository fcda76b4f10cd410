#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace dhj {

enum class Regime { Subquadratic, Quadratic, Superquadratic };

/// Derived exponents and constants of u_t - Δu = |∇u|^p for a fixed p > 1.
///
/// beta is the natural scaling exponent of the equation; gamma_ss drives the
/// self-similar profiles; c_p normalizes the one-dimensional stationary
/// solutions (undefined at p = 2, where the stationary family is logarithmic);
/// L_limit is the coefficient of the y^{beta+1} growth of profile tails.
struct ExponentContext {
    double p = 0.0;
    double beta = 0.0;                 // 1/(p-1)
    double gamma_ss = 0.0;             // (p-2)/(2(p-1)) == (1-beta)/2
    std::optional<double> c_p;         // beta^beta/|1-beta|, absent for p == 2
    double L_limit = 0.0;              // p^{-beta}/(beta+1)
    Regime regime = Regime::Quadratic;
};

/// Builds the full context. Throws std::invalid_argument for p <= 1.
ExponentContext make_context(double p);

const char* regime_name(Regime r);

} // namespace dhj
