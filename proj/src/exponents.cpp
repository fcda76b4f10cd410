#include "dhj/exponents.hpp"

#include <cmath>

namespace dhj {

ExponentContext make_context(double p) {
    if (!(p > 1.0)) {
        throw std::invalid_argument("make_context: requires p > 1, got p=" + std::to_string(p));
    }
    ExponentContext ctx;
    ctx.p = p;
    ctx.beta = 1.0 / (p - 1.0);
    ctx.gamma_ss = (p - 2.0) / (2.0 * (p - 1.0));
    ctx.L_limit = std::pow(p, -ctx.beta) / (ctx.beta + 1.0);
    if (p < 2.0) {
        ctx.regime = Regime::Subquadratic;
    } else if (p == 2.0) {
        ctx.regime = Regime::Quadratic;
    } else {
        ctx.regime = Regime::Superquadratic;
    }
    if (p != 2.0) {
        ctx.c_p = std::pow(ctx.beta, ctx.beta) / std::abs(1.0 - ctx.beta);
    }
    return ctx;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Subquadratic: return "subquadratic";
        case Regime::Quadratic: return "quadratic";
        case Regime::Superquadratic: return "superquadratic";
    }
    return "unknown";
}

} // namespace dhj
