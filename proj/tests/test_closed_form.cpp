#include "dhj/closed_form.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

using namespace dhj;

namespace {

// deterministic uniform samples in [0,1)
struct SplitMix {
    std::uint64_t state;
    explicit SplitMix(std::uint64_t seed) : state(seed) {}
    double next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        return (z >> 11) * 0x1.0p-53;
    }
    double in(double lo, double hi) { return lo + (hi - lo) * next(); }
};

double residual_scale(const EvalResult& e, double p) {
    return 1.0 + std::abs(e.u_t) + std::abs(e.laplacian_u) + pow_abs(grad_norm(e), p);
}

// central finite differences of eval().u as the independent derivative oracle
void check_derivatives_fd(const ClosedFormSolution& s, const SpaceTimePoint& pt, double tol) {
    const double dh = 1e-6;
    const EvalResult e = s.eval(pt);
    for (std::size_t d = 0; d < pt.x.size(); ++d) {
        SpaceTimePoint a = pt, b = pt;
        a.x[d] -= dh;
        b.x[d] += dh;
        const double fd = (s.eval(b).u - s.eval(a).u) / (2.0 * dh);
        CHECK(std::abs(fd - e.grad_u[d]) <= tol * (1.0 + std::abs(e.grad_u[d])));
    }
    SpaceTimePoint a = pt, b = pt;
    a.t -= dh;
    b.t += dh;
    const double fd_t = (s.eval(b).u - s.eval(a).u) / (2.0 * dh);
    CHECK(std::abs(fd_t - e.u_t) <= tol * (1.0 + std::abs(e.u_t)));
}

std::shared_ptr<ProfileTrajectory> make_profile(double p, double alpha, int sigma, double y_max) {
    const ExponentContext ctx = make_context(p);
    IntegratorControls c;
    c.y_max = y_max;
    const ProfileOde ode = sigma > 0 ? backward_ode(ctx) : forward_ode(ctx);
    return std::make_shared<ProfileTrajectory>(integrate(ode, alpha, c));
}

} // namespace

TEST_CASE("traveling wave evaluation") {
    auto s = ClosedFormSolution::traveling_wave(make_context(3.0), {1.0});
    const EvalResult e = s.eval({{0.0}, 1.0});
    CHECK(e.u == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.grad_u[0] == 1.0);
    CHECK(e.u_t == 1.0);
    CHECK(e.laplacian_u == 0.0);
    CHECK(s.residual({{0.3}, -2.7}) == 0.0);
}

TEST_CASE("stationary half-line values and the c(p) normalization") {
    auto s = ClosedFormSolution::stationary_half_line(make_context(3.0), 0.0);
    CHECK(s.eval({{4.0}, 0.0}).u == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));

    // subquadratic branch: residual fixes c(p) = beta^beta/(beta-1)
    auto sub = ClosedFormSolution::stationary_half_line(make_context(1.5), 1.0);
    CHECK(std::abs(sub.residual({{2.0}, 0.0})) <= 1e-12);
    CHECK(sub.eval({{2.0}, 0.0}).u > 0.0);
}

TEST_CASE("quadratic families demand p = 2 and the half-line rejects it") {
    const ExponentContext p2 = make_context(2.0);
    const ExponentContext p3 = make_context(3.0);
    CHECK_THROWS_AS(ClosedFormSolution::quadratic_sinh(p3, 1.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(ClosedFormSolution::quadratic_log_linear(p3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ClosedFormSolution::log_heat_kernel(p3, 2), std::invalid_argument);
    CHECK_THROWS_AS(ClosedFormSolution::stationary_half_line(p2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ClosedFormSolution::stationary_half_line(make_context(1.5), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ClosedFormSolution::traveling_wave(p3, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ClosedFormSolution::linear_optimality(p3, 1.0), std::invalid_argument);
}

TEST_CASE("quadratic sinh boundary value and family consistency") {
    auto s = ClosedFormSolution::quadratic_sinh(make_context(2.0), 1.0, {});
    CHECK(s.eval({{0.0}, 0.7}).u == 0.0);
    // with no drift and k = 1 this is u = log(1 + e^t sinh x)
    for (double x : {0.1, 0.9, 2.4}) {
        for (double t : {-1.0, 0.0, 1.3}) {
            const double direct = std::log(1.0 + std::exp(t) * std::sinh(x));
            CHECK(s.eval({{x}, t}).u == doctest::Approx(direct).epsilon(1e-14));
        }
    }
}

TEST_CASE("log heat kernel residual vanishes") {
    auto s = ClosedFormSolution::log_heat_kernel(make_context(2.0), 2);
    CHECK(std::abs(s.residual({{1.0, 1.0}, 1.0})) <= 1e-12);
    CHECK_THROWS_AS(s.eval({{1.0, 1.0}, 0.0}), std::domain_error);
    CHECK_THROWS_AS(s.eval({{1.0, 1.0}, -1.0}), std::domain_error);
}

TEST_CASE("finite-difference oracle agrees with hand-coded derivatives") {
    check_derivatives_fd(ClosedFormSolution::traveling_wave(make_context(2.5), {0.4, -1.1}),
                         {{0.3, 0.8}, 0.5}, 1e-7);
    check_derivatives_fd(ClosedFormSolution::stationary_half_line(make_context(3.0), 1.0),
                         {{1.7}, 0.0}, 1e-7);
    check_derivatives_fd(ClosedFormSolution::stationary_half_line(make_context(1.5), 2.0),
                         {{0.9}, 0.0}, 1e-7);
    check_derivatives_fd(ClosedFormSolution::quadratic_sinh(make_context(2.0), 1.3, {0.5}),
                         {{0.2, 0.7}, 0.1}, 1e-6);
    check_derivatives_fd(ClosedFormSolution::log_heat_kernel(make_context(2.0), 2),
                         {{0.4, -0.6}, 0.8}, 1e-7);
    check_derivatives_fd(ClosedFormSolution::linear_optimality(make_context(3.0), 0.1),
                         {{0.2}, 0.4}, 1e-6);
}

TEST_CASE("residuals vanish at 1e3 pseudo-random in-domain points per variant") {
    auto profile_b = make_profile(3.0, 0.1, +1, 60.0);
    auto profile_f = make_profile(3.0, 0.05, -1, 60.0);

    struct Case {
        ClosedFormSolution s;
        std::function<SpaceTimePoint(SplitMix&)> draw;
    };
    std::vector<Case> cases;
    cases.push_back({ClosedFormSolution::traveling_wave(make_context(3.0), {1.0}),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(-5, 5)}, g.in(-5, 5)}; }});
    cases.push_back({ClosedFormSolution::traveling_wave(make_context(1.7), {0.3, -2.0}),
                     [](SplitMix& g) {
                         return SpaceTimePoint{{g.in(-5, 5), g.in(-5, 5)}, g.in(-5, 5)};
                     }});
    cases.push_back({ClosedFormSolution::stationary_half_line(make_context(3.0), 1.0),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 10)}, g.in(-3, 3)}; }});
    cases.push_back({ClosedFormSolution::stationary_half_line(make_context(1.5), 0.5),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 10)}, g.in(-3, 3)}; }});
    cases.push_back({ClosedFormSolution::quadratic_sinh(make_context(2.0), 1.0, {0.7}),
                     [](SplitMix& g) {
                         return SpaceTimePoint{{g.in(-2, 2), g.in(0, 3)}, g.in(-1, 1)};
                     }});
    cases.push_back({ClosedFormSolution::quadratic_log_linear(make_context(2.0), 2.0),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 10)}, g.in(-3, 3)}; }});
    cases.push_back({ClosedFormSolution::log_heat_kernel(make_context(2.0), 3),
                     [](SplitMix& g) {
                         return SpaceTimePoint{{g.in(-3, 3), g.in(-3, 3), g.in(-3, 3)},
                                               g.in(0.01, 4)};
                     }});
    cases.push_back({ClosedFormSolution::linear_optimality(make_context(3.0), 0.01),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(-2, 2)}, g.in(0.001, 1)}; }});
    cases.push_back({ClosedFormSolution::self_similar(ProfileDirection::Backward, profile_b),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 2)}, -g.in(0.01, 3)}; }});
    cases.push_back({ClosedFormSolution::self_similar(ProfileDirection::Forward, profile_f),
                     [](SplitMix& g) { return SpaceTimePoint{{g.in(0, 2)}, g.in(0.01, 3)}; }});

    std::uint64_t seed = 7;
    for (const auto& c : cases) {
        SplitMix gen(seed++);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const SpaceTimePoint pt = c.draw(gen);
            REQUIRE(c.s.in_domain(pt));
            const EvalResult e = c.s.eval(pt);
            worst = std::max(worst, std::abs(c.s.residual(pt)) / residual_scale(e, c.s.context().p));
        }
        INFO(c.s.family_name());
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("self-similar domains are enforced") {
    auto traj = make_profile(3.0, 0.1, +1, 30.0);
    auto s = ClosedFormSolution::self_similar(ProfileDirection::Backward, traj);
    CHECK_THROWS_AS(s.eval({{1.0}, 0.5}), std::domain_error);  // forward time
    CHECK_THROWS_AS(s.eval({{-1.0}, -0.5}), std::domain_error); // negative x_n
    CHECK_THROWS_AS(s.eval({{100.0}, -0.5}), std::domain_error); // beyond coverage
    CHECK(s.in_domain({{1.0}, -1.0}));
}

TEST_CASE("rescaling acts as the pointwise map") {
    SUBCASE("identity at lambda = 1") {
        auto s = ClosedFormSolution::traveling_wave(make_context(3.0), {1.0});
        auto r = s.rescaled(1.0);
        CHECK(r.eval({{0.4}, 0.2}).u == s.eval({{0.4}, 0.2}).u);
    }
    SUBCASE("pointwise identity for several variants") {
        const double lambda = 1.7;
        std::vector<ClosedFormSolution> sols;
        sols.push_back(ClosedFormSolution::traveling_wave(make_context(3.0), {0.8}));
        sols.push_back(ClosedFormSolution::stationary_half_line(make_context(3.0), 1.0));
        sols.push_back(ClosedFormSolution::quadratic_sinh(make_context(2.0), 1.0, {}));
        sols.push_back(ClosedFormSolution::log_heat_kernel(make_context(2.0), 2));
        for (const auto& s : sols) {
            const double beta = s.context().beta;
            auto r = s.rescaled(lambda);
            const int n = s.ambient_dim();
            SpaceTimePoint pt{std::vector<double>(n, 0.6), 0.5};
            SpaceTimePoint mapped{std::vector<double>(n, 0.6 * lambda), 0.5 * lambda * lambda};
            const double want = std::pow(lambda, beta - 1.0) * s.eval(mapped).u;
            INFO(s.family_name());
            CHECK(r.eval(pt).u == doctest::Approx(want).epsilon(1e-12));
            CHECK(std::abs(r.residual(pt)) <= 1e-10);
        }
    }
    SUBCASE("half-line offset maps to offset/lambda") {
        auto s = ClosedFormSolution::stationary_half_line(make_context(3.0), 1.0);
        auto r = s.rescaled(2.0);
        auto direct = ClosedFormSolution::stationary_half_line(make_context(3.0), 0.5);
        for (double x : {0.0, 0.3, 1.8, 7.0}) {
            CHECK(r.eval({{x}, 0.0}).u == doctest::Approx(direct.eval({{x}, 0.0}).u).epsilon(1e-12));
        }
    }
    SUBCASE("composition multiplies the factors") {
        auto s = ClosedFormSolution::stationary_half_line(make_context(2.5), 1.0);
        auto a = s.rescaled(0.7).rescaled(3.1);
        auto b = s.rescaled(0.7 * 3.1);
        for (double x : {0.1, 1.0, 4.2}) {
            CHECK(a.eval({{x}, 0.0}).u == doctest::Approx(b.eval({{x}, 0.0}).u).epsilon(1e-10));
        }
    }
    SUBCASE("backward self-similar solutions are scale-invariant") {
        auto traj = make_profile(3.0, 0.1, +1, 60.0);
        auto s = ClosedFormSolution::self_similar(ProfileDirection::Backward, traj);
        auto r = s.rescaled(2.0);
        for (double x : {0.5, 1.5}) {
            CHECK(r.eval({{x}, -1.3}).u == doctest::Approx(s.eval({{x}, -1.3}).u).epsilon(1e-12));
        }
    }
}
