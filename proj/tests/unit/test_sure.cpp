#include <doctest.h>

#include <cmath>

#include "scoring/divergences.hpp"
#include "scoring/sure.hpp"
#include "support.hpp"

using namespace scoring;
using namespace scoring::testing;

TEST_CASE("sure estimate examples")
{
    Rng rng(3);
    for (std::size_t d : {1u, 3u})
    {
        const auto id = identity_estimator(d);
        for (int i = 0; i < 5; ++i)
            CHECK(sure_estimate(id, normal_point(rng, d, 3.0)) == static_cast<double>(d));
    }
    const auto zero = zero_estimator(1);
    for (double x : {-2.0, 0.0, 0.5})
        CHECK(sure_estimate(zero, Vector::Constant(1, x)) == doctest::Approx(x * x - 1).epsilon(1e-15));

    const auto f = gaussian_prior_marginal({1.0}, {Vector::Zero(1)}, {1.0});
    const auto pm = posterior_mean_estimator(f);
    for (double x : {-2.0, 0.0, 1.3})
    {
        CHECK(pm.shift(Vector::Constant(1, x))[0] == doctest::Approx(-x / 2).epsilon(1e-15));
        CHECK(sure_estimate(pm, Vector::Constant(1, x)) == doctest::Approx(x * x / 4).epsilon(1e-14));
    }
}

TEST_CASE("sure log form")
{
    Rng rng(4);
    for (const auto& fam : all_families())
    {
        CAPTURE(fam.name);
        const auto pm = posterior_mean_estimator(fam.density);
        const double d = static_cast<double>(fam.density->dim());
        for (int i = 0; i < 20; ++i)
        {
            const Vector x = normal_point(rng, fam.density->dim(), 1.5);
            const double s = sure_log_form(*fam.density, x);
            CHECK(std::abs(s - sure_estimate(pm, x)) <= 1e-12);
            CHECK(std::abs(s - (hyvarinen_score(*fam.density, x) + d)) <= 1e-12);
        }
    }
    CHECK(std::abs(sure_log_form(*gaussian_iso(Vector::Zero(1), 2.0), Vector::Zero(1))) <= 1e-15);
}

TEST_CASE("analytic divergence matches finite differences")
{
    Rng rng(5);
    for (const auto& fam : all_families())
    {
        const auto pm = posterior_mean_estimator(fam.density);
        REQUIRE_FALSE(pm.approximate_divergence());
        const ShiftEstimator numeric(fam.density->dim(), [&](const Vector& x) { return pm.shift(x); });
        CHECK(numeric.approximate_divergence());
        for (int i = 0; i < 100; ++i)
        {
            const Vector x = normal_point(rng, fam.density->dim(), 1.5);
            CHECK(rel_err(pm.divergence(x), numeric.divergence(x)) <= 1e-4);
        }
    }
}

TEST_CASE("quadratic risk examples")
{
    for (std::size_t d : {1u, 2u})
    {
        const Vector theta = Vector::Constant(static_cast<Eigen::Index>(d), 0.7);
        const auto r = quadratic_risk_mc(identity_estimator(d), theta, 100000, 1);
        CHECK(agree(r, static_cast<double>(d)));
    }
    const auto z = quadratic_risk_mc(zero_estimator(2), Vector::Zero(2), 1000, 1);
    CHECK(z.value == 0.0);
    CHECK(z.error == 0.0);
    const auto f = gaussian_prior_marginal({1.0}, {Vector::Zero(1)}, {1.0});
    CHECK(agree(quadratic_risk_mc(posterior_mean_estimator(f), Vector::Zero(1), 200000, 2), 0.25));
}

TEST_CASE("unbiasedness experiment examples")
{
    MonteCarloConfig mc;
    mc.samples = 100000;
    mc.seed = 8;
    const auto id = unbiasedness_experiment(identity_estimator(2), Vector{{1.0, -2.0}}, mc);
    CHECK(id.success);
    CHECK_FALSE(id.divergence.has_value());

    for (std::size_t d : {1u, 2u})
    {
        const auto dim = static_cast<Eigen::Index>(d);
        const auto f = gaussian_prior_marginal({1.0}, {Vector::Zero(dim)}, {1.0});
        QuadratureConfig quad;
        quad.nodes_per_axis = d == 2 ? 201 : 401;
        const auto r = unbiasedness_experiment(posterior_mean_estimator(f), Vector::Zero(dim), mc, f, quad);
        CHECK(r.success);
        const double expected = 0.25 * static_cast<double>(d);
        CHECK(std::abs(r.divergence->value - expected) <= r.divergence->tolerance() + 1e-12);
        CHECK(std::abs(r.risk.mean - expected) <= 5 * r.risk.stderr_);
        CHECK(std::abs(r.sure.mean - expected) <= 5 * r.sure.stderr_);
    }

    // Shrinkage towards a mixture prior: SURE and the loss differ draw by
    // draw, so the check has teeth.
    const auto f = gaussian_prior_marginal({0.4, 0.6}, {Vector::Constant(1, -1.5), Vector::Constant(1, 1.0)}, {0.5, 1.0});
    const auto r = unbiasedness_experiment(posterior_mean_estimator(f), Vector::Constant(1, 0.5), mc, f);
    CHECK(r.success);
    CHECK(r.difference.stderr_ > 1e-3);
}

TEST_CASE("risk equals the hyvarinen divergence of the marginal")
{
    const auto f = gaussian_prior_marginal({1.0}, {Vector::Zero(1)}, {1.0});
    for (double t : {0.0, 1.0, -2.0})
    {
        const Vector theta = Vector::Constant(1, t);
        const auto risk = quadratic_risk_mc(posterior_mean_estimator(f), theta, 200000, 3);
        const auto dhs = hyvarinen_divergence(*f, *gaussian_iso(theta, 1.0), QuadratureConfig{});
        // Bias^2 + variance: t^2 / 4 + 1/4.
        CHECK(std::abs(dhs.value - (t * t + 1) / 4) <= dhs.tolerance() + 1e-12);
        CHECK(std::abs(risk.value - dhs.value) <= risk.tolerance() + dhs.tolerance());
    }
}

TEST_CASE("shift model and prior validation")
{
    const auto g = gaussian(Vector{{1.0, 2.0}}, Matrix::Identity(2, 2));
    CHECK(ShiftModel::from_gaussian(*g).theta == g->mean());
    CHECK_THROWS_AS(ShiftModel::from_gaussian(*gaussian_iso(Vector::Zero(1), 2.0)), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_prior_marginal({1.0}, {Vector::Zero(1)}, {-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(sure_estimate(identity_estimator(2), Vector::Zero(3)), std::invalid_argument);
}
