#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "fedvar/minimize.hpp"
#include "fedvar/objective.hpp"
#include "fedvar/problems.hpp"
#include "support.hpp"

using namespace fedvar;

TEST_CASE("huber values and gradients") {
    const auto h = make_huber({0.0});
    CHECK(h->value(Point{0.5}) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(h->value(Point{2.0}) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(h->gradient(Point{0.5})[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(h->gradient(Point{4.0})[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(h->gradient(Point{-4.0})[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(h->f_inf() == 0.0);
    CHECK(h->smoothness() == 1.0);
}

TEST_CASE("softplus values and gradients") {
    const auto s = make_softplus(2.0);
    CHECK(s->value(Point{1.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(s->gradient(Point{1.0})[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s->smoothness() == 0.25);
    // overflow-safe far in the linear regime
    CHECK(s->value(Point{500.0}) == doctest::Approx(499.0).epsilon(1e-12));
}

TEST_CASE("quadratic family") {
    const auto q = make_quadratic(2.0, {0.0});  // x^2
    CHECK(q->value(Point{3.0}) == doctest::Approx(9.0));
    CHECK(q->gradient(Point{3.0})[0] == doctest::Approx(6.0));
    CHECK(q->smoothness() == 2.0);
    CHECK(q->pl_constant().value() == 2.0);
}

TEST_CASE("dimension mismatch rejected") {
    const auto q = make_quadratic(1.0, {0.0, 0.0});
    CHECK_THROWS_AS(q->value(Point{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(q->gradient(Point{1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("average objective is the exact mean") {
    SUBCASE("two identical quadratics") {
        const auto q = make_quadratic(2.0, {0.0});
        const auto avg = make_average({q, q});
        CHECK(avg->value(Point{3.0}) == doctest::Approx(9.0));
    }
    SUBCASE("pair average value at -0.5, hand evaluation") {
        const auto f1 = make_quadratic(2.0, {0.0});
        const auto f2 = make_huber({-2.0});
        const auto avg = make_average({f1, f2});
        // (0.25 + 1.0) / 2
        CHECK(avg->value(Point{-0.5}) == doctest::Approx(0.625).epsilon(1e-15));
    }
    SUBCASE("suite average gradient equals mean of agent gradients") {
        const auto problem = make_softplus_suite(16);
        for (double x : {-3.0, 0.0, 1.7, 12.0}) {
            const Point p{x};
            double mean = 0.0;
            for (int i = 0; i < problem.n(); ++i) mean += problem.agent(i).gradient(p)[0];
            mean /= problem.n();
            CHECK(problem.average().gradient(p)[0] == doctest::Approx(mean).epsilon(1e-12));
        }
    }
}

TEST_CASE("gradients match central finite differences") {
    const auto huber = make_huber({0.0});
    const auto softplus = make_softplus(5.0);
    const auto quad = make_quadratic(3.0, {1.5});
    const auto avg = make_average({huber, softplus, quad});
    for (const auto& obj : {huber, softplus, quad, avg}) {
        for (double x : testsupport::grid(-8.0, 8.0, 201)) {
            // stay away from the huber curvature breaks at |x| = 1
            if (std::abs(std::abs(x) - 1.0) < 1e-4) continue;
            const double g = obj->gradient(Point{x})[0];
            const double fd = testsupport::central_diff(*obj, x);
            CHECK(std::abs(g - fd) <= 1e-6 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("values never fall below the stored infimum") {
    const auto problem = make_softplus_suite(8);
    for (int i = 0; i < problem.n(); ++i) {
        for (double x : testsupport::grid(-50.0, 50.0, 5000)) {
            CHECK(problem.agent(i).value(Point{x}) >= problem.agent(i).f_inf());
        }
    }
    for (double x : testsupport::grid(-50.0, 50.0, 5000)) {
        CHECK(problem.average().value(Point{x}) >= problem.average().f_inf() - 1e-10);
    }
}

TEST_CASE("self-bounding gradient inequality on grids") {
    // ||grad f_i(x)||^2 <= 2 L (f_i(x) - f_i*)
    const auto huber = make_huber({0.0});
    const auto softplus = make_softplus(7.0);
    const auto quad = make_quadratic(2.0, {-1.0});
    for (const auto& obj : {huber, softplus, quad}) {
        for (double x : testsupport::grid(-20.0, 20.0, 10000)) {
            const double g2 = norm_sq(std::span<const double>(obj->gradient(Point{x})));
            const double bound = 2.0 * obj->smoothness() * (obj->value(Point{x}) - obj->f_inf());
            CHECK(g2 <= bound + 1e-12);
        }
    }
}

TEST_CASE("smoothness constant bounds sampled gradient differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-15.0, 15.0);
    const auto huber = make_huber({0.3});
    const auto softplus = make_softplus(3.0);
    const auto quad = make_quadratic(1.7, {2.0});
    for (const auto& obj : {huber, softplus, quad}) {
        for (int k = 0; k < 2000; ++k) {
            const double x = u(rng), y = u(rng);
            const double dg = std::abs(obj->gradient(Point{x})[0] - obj->gradient(Point{y})[0]);
            CHECK(dg <= obj->smoothness() * std::abs(x - y) + 1e-12);
        }
    }
}

TEST_CASE("affine composite shifts values and keeps gradients") {
    const auto q = make_quadratic(2.0, {0.0});
    const auto shifted = make_affine(q, 1.0, 5.0);
    CHECK(shifted->value(Point{2.0}) == doctest::Approx(9.0));
    CHECK(shifted->gradient(Point{2.0})[0] == doctest::Approx(4.0));
    CHECK(shifted->f_inf() == doctest::Approx(5.0));
    const auto scaled = make_affine(q, 3.0, 0.0);
    CHECK(scaled->smoothness() == doctest::Approx(6.0));
    CHECK(scaled->pl_constant().value() == doctest::Approx(6.0));
}

TEST_CASE("certified_infimum basics") {
    SUBCASE("huber on [-5, 5]") {
        const auto h = make_huber({0.0});
        CHECK(certified_infimum(*h, {-5.0, 5.0}, 1e-10) == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("random quadratics certify to zero") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> ua(0.1, 10.0), uc(-5.0, 5.0);
        for (int k = 0; k < 50; ++k) {
            const auto q = make_quadratic(ua(rng), {uc(rng)});
            const double v = certified_infimum(*q, {-20.0, 20.0}, 1e-9);
            CHECK(std::abs(v) <= 1e-9);
        }
    }
    SUBCASE("minimizer outside the bracket fails certification") {
        const auto q = make_quadratic(1.0, {100.0});
        CHECK_THROWS_AS(certified_infimum(*q, {-5.0, 5.0}, 1e-9), CertificationError);
    }
    SUBCASE("pair averages reproduce the heterogeneity table infima") {
        for (auto [d, expected] : std::vector<std::pair<double, double>>{
                 {-100.0, 49.625}, {-50.0, 24.625}, {-20.0, 9.625}, {-2.0, 0.625}}) {
            const auto avg = make_average({make_quadratic(2.0, {0.0}), make_huber({d})});
            const double v =
                certified_infimum(*avg, {-std::abs(d) - 10.0, std::abs(d) + 10.0}, 1e-9);
            CHECK(v == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("problem construction invariants") {
    const auto problem = make_quadratic_huber_pair(-2.0);
    CHECK(problem.n() == 2);
    CHECK(problem.f_star() == doctest::Approx(0.625).epsilon(1e-9));
    CHECK(problem.f_star() >= problem.mean_agent_f_inf() - 1e-12);
    CHECK(problem.L_mean() == doctest::Approx(1.5));
    CHECK(problem.L_max() == doctest::Approx(2.0));
    CHECK(problem.average().f_inf() == doctest::Approx(problem.f_star()));

    CHECK_THROWS_AS(FederatedProblem({}, {}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FederatedProblem({make_huber({0.0}), make_huber({0.0, 0.0})},
                                     {make_exact_oracle(make_huber({0.0})),
                                      make_exact_oracle(make_huber({0.0, 0.0}))},
                                     0.0),
                    std::invalid_argument);
}
