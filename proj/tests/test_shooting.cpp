#include "dhj/shooting.hpp"

#include <doctest.h>

#include <cmath>

using namespace dhj;

TEST_CASE("guaranteed backward slope bound") {
    CHECK(backward_alpha0(make_context(3.0)) == doctest::Approx(std::sqrt(0.125)).epsilon(1e-14));
    CHECK(backward_alpha0(make_context(2.0)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(backward_alpha0(make_context(1.5)) == doctest::Approx(0.0625).epsilon(1e-14));
}

TEST_CASE("guaranteed forward J1 slope bound") {
    CHECK(forward_alpha1(make_context(3.0)) ==
          doctest::Approx(0.08206099398622183).epsilon(1e-9));
    CHECK(forward_alpha1(make_context(4.0)) > 0.0);
    CHECK_THROWS_AS(forward_alpha1(make_context(2.0)), std::invalid_argument);
}

TEST_CASE("threshold formulas respond smoothly to p") {
    for (double p : {2.5, 3.0, 4.0}) {
        const double da0 = std::abs(backward_alpha0(make_context(p + 1e-9)) -
                                    backward_alpha0(make_context(p - 1e-9)));
        const double da1 = std::abs(forward_alpha1(make_context(p + 1e-9)) -
                                    forward_alpha1(make_context(p - 1e-9)));
        CHECK(da0 <= 1e-7);
        CHECK(da1 <= 1e-7);
    }
}

TEST_CASE("backward profile report") {
    const ExponentContext ctx = make_context(3.0);
    IntegratorControls c;
    c.y_max = 200.0;
    const auto res = backward_profile(ctx, 0.1, c);
    CHECK(res.report.shape_ok);
    CHECK(res.report.phi_positive);
    CHECK(res.report.phi_prime_positive);
    CHECK(res.report.upcross_count == 1);
    REQUIRE(res.report.r_bar.has_value());
    CHECK(res.report.psi_rel_err_vs_limit <= 0.02);
    CHECK(res.report.z_check);
    CHECK(res.report.z_tail_min >= res.report.z_liminf_bound);

    const ExponentContext p25 = make_context(2.5);
    const auto res25 = backward_profile(p25, 0.5 * backward_alpha0(p25), c);
    CHECK(res25.report.shape_ok);
    CHECK(res25.report.upcross_count == 1);

    CHECK_THROWS_AS(backward_profile(ctx, 0.9, c), std::invalid_argument); // above alpha0
    CHECK_THROWS_AS(backward_profile(ctx, 0.0, c), std::invalid_argument);
}

TEST_CASE("forward classification at anchored slopes") {
    const ExponentContext ctx = make_context(3.0);
    IntegratorControls c;
    const double a1 = forward_alpha1(ctx);

    const ForwardClass low = classify_forward(ctx, a1 / 2.0, c);
    CHECK(low.tag == ForwardTag::J1);
    REQUIRE(low.witness_y.has_value());

    const ForwardClass high = classify_forward(ctx, 2.0, c);
    CHECK(high.tag == ForwardTag::J2);

    IntegratorControls tiny = c;
    tiny.y_max = 4.0;
    const ForwardClass near = classify_forward(ctx, 0.5485139808730668, tiny);
    CHECK(near.tag == ForwardTag::Undetermined);

    CHECK_THROWS_AS(classify_forward(make_context(2.0), 0.5, c), std::invalid_argument);
    CHECK_THROWS_AS(classify_forward(ctx, 0.0, c), std::invalid_argument);
}

TEST_CASE("steep p = 4 blow-ups classify without stalling") {
    // trial RK stages can overflow near R_max; the controller must recover
    const ExponentContext ctx = make_context(4.0);
    IntegratorControls c;
    for (double alpha : {0.85, 1.5, 3.0}) {
        const ForwardClass fc = classify_forward(ctx, alpha, c);
        CHECK(fc.tag == ForwardTag::J2);
    }
}

TEST_CASE("critical alpha bisection") {
    const ExponentContext ctx = make_context(3.0);
    IntegratorControls c;
    const auto res = critical_alpha(ctx, 1e-6, c);
    CHECK(res.hi - res.lo <= 1e-6);
    CHECK(res.lo >= forward_alpha1(ctx));
    CHECK(res.hi <= 1.0);
    CHECK(classify_forward(ctx, res.lo, c).tag == ForwardTag::J1);
    IntegratorControls wide = c;
    wide.y_max = res.y_max_used;
    CHECK(classify_forward(ctx, res.hi, wide).tag == ForwardTag::J2);

    // reproducible across different initial upper probes
    const auto res4 = critical_alpha(ctx, 1e-6, c, 800.0, 4.0);
    CHECK(std::abs(res4.alpha_star - res.alpha_star) <= 2e-6);
    CHECK(res4.lo <= res.hi);
    CHECK(res.lo <= res4.hi);
}

TEST_CASE("classification is monotone along an alpha grid") {
    const ExponentContext ctx = make_context(3.0);
    IntegratorControls c;
    const double a_lo = forward_alpha1(ctx) / 2.0, a_hi = 4.0;
    const int n = 18;
    int state = 0; // 0 = J1 so far, 1 = undetermined seen, 2 = J2 seen
    for (int i = 0; i < n; ++i) {
        const double alpha = a_lo * std::pow(a_hi / a_lo, static_cast<double>(i) / (n - 1));
        const ForwardClass fc = classify_forward(ctx, alpha, c);
        if (fc.tag == ForwardTag::J1) {
            CHECK(state == 0);
        } else if (fc.tag == ForwardTag::Undetermined) {
            CHECK(state <= 1);
            state = 1;
        } else {
            state = 2;
        }
    }
    CHECK(state == 2);
}

TEST_CASE("critical profile bounds inside the divergence horizon") {
    const ExponentContext ctx = make_context(3.0);
    IntegratorControls c;
    const auto bracket = critical_alpha(ctx, 1e-6, c);
    const auto rep = critical_profile_report(ctx, bracket, c);
    CHECK(rep.horizon > 3.0);
    CHECK(rep.bounds_ok);
    CHECK(rep.min_phi_minus_alpha_y >= -1e-3);
    CHECK(rep.min_lower_gap >= -1e-3);
    CHECK(rep.min_upper_gap >= -1e-3);
    CHECK(rep.min_phi_pp >= -1e-3);
    CHECK(rep.psi_at_horizon > 0.0);
}

TEST_CASE("forward profiles are ordered in alpha") {
    const ExponentContext ctx = make_context(3.0);
    IntegratorControls c;
    c.y_max = 60.0;
    const auto rep = compare_profiles(ctx, 0.05, 0.5, c);
    CHECK(rep.ordered);
    CHECK(rep.min_phi_gap > 0.0);
    CHECK(rep.min_phi_prime_gap > 0.0);

    // ordering persists up to the blow-up of the larger slope
    const auto rep2 = compare_profiles(ctx, 0.05, 2.0, c);
    CHECK(rep2.ordered);
    CHECK(rep2.y_compared_to < 1.0); // the J2 trajectory ends early

    CHECK_THROWS_AS(compare_profiles(ctx, 0.3, 0.3, c), std::invalid_argument);
    CHECK_THROWS_AS(compare_profiles(ctx, 0.5, 0.1, c), std::invalid_argument);
}
