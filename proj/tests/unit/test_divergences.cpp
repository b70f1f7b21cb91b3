#include <doctest.h>

#include <cmath>

#include "scoring/divergences.hpp"
#include "support.hpp"

using namespace scoring;
using namespace scoring::testing;

namespace {

DensityPtr normal1(double mean, double var) { return gaussian_iso(Vector::Constant(1, mean), var); }

}  // namespace

TEST_CASE("expected score examples")
{
    const QuadratureConfig quad;
    for (std::size_t d : {1u, 2u})
    {
        const auto n = gaussian_iso(Vector::Zero(static_cast<Eigen::Index>(d)), 1.0);
        QuadratureConfig q = quad;
        if (d == 2)
            q.nodes_per_axis = 201;
        CHECK(agree(expected_score(ScoringRule::hyvarinen(), *n, *n, q), -static_cast<double>(d)));
    }
    MonteCarloConfig mc;
    mc.samples = 200000;
    const auto n3 = gaussian_iso(Vector::Zero(3), 1.0);
    CHECK(agree(expected_score(ScoringRule::hyvarinen(), *n3, *n3, mc), -3.0));

    for (double mu : {0.5, 1.0, 2.0})
        CHECK(agree(expected_score(ScoringRule::hyvarinen(), *normal1(mu, 1.0), *normal1(0, 1.0), quad), mu * mu - 1));
    CHECK(expected_score(ScoringRule::radial(zero_profile()), *normal1(1, 1), *normal1(0, 1), quad).value == 0.0);
}

TEST_CASE("bregman divergence examples")
{
    const QuadratureConfig quad;
    const auto q = normal1(0, 1);
    for (const auto& p : {normal1(0, 1), normal1(1, 2)})
    {
        const auto self = bregman_divergence(ScoringRule::radial(logcosh_profile()), *p, *p, quad);
        CHECK(std::abs(self.value) <= self.tolerance());
    }
    for (double mu : {0.5, 1.0, 3.0})
    {
        const auto r = bregman_divergence(ScoringRule::hyvarinen(), *normal1(mu, 1), *q, quad);
        CHECK(std::abs(r.value - mu * mu) <= r.tolerance());
        CHECK(r.method == DivergenceMethod::ExpectedScore);
    }
    const auto r = bregman_divergence(ScoringRule::hyvarinen(), *normal1(0, 2), *q, quad);
    CHECK(std::abs(r.value - 0.25) <= r.tolerance());

    MonteCarloConfig mc;
    mc.samples = 100000;
    mc.seed = 5;
    const auto rm = bregman_divergence(ScoringRule::hyvarinen(), *normal1(1, 1), *q, mc);
    CHECK(std::abs(rm.value - 1.0) <= rm.tolerance());
    CHECK(rm.engine == EngineKind::MonteCarlo);
}

TEST_CASE("integrand examples")
{
    Rng rng(6);
    const RadialKernel hk(hyvarinen_profile(), 3);
    for (int i = 0; i < 100; ++i)
    {
        const Vector x = normal_point(rng, 3);
        const Vector sp = normal_point(rng, 3, 2.0);
        const Vector sq = normal_point(rng, 3, 2.0);
        CHECK(std::abs(bregman_integrand(hk, x, sp, sq) - (sp - sq).squaredNorm()) <= 1e-12 * (1 + (sp - sq).squaredNorm()));
        CHECK(bregman_integrand(hk, x, sp, sp) == 0.0);
        CHECK(bregman_integrand(RadialKernel(logcosh_profile(), 3), x, sq, sq) == 0.0);
    }
    const RadialKernel lk(logcosh_profile(), 1);
    const double v = bregman_integrand(lk, Vector::Zero(1), Vector::Constant(1, 1.0), Vector::Zero(1));
    CHECK(v == doctest::Approx(0.3278133254727377).epsilon(1e-15));
}

TEST_CASE("integrand is non-negative for concave kernels")
{
    Rng rng(77);
    for (const auto& p : {hyvarinen_profile(), logcosh_profile(), logcosh_profile(0.2)})
        for (int i = 0; i < 3000; ++i)
        {
            const std::size_t d = 1 + static_cast<std::size_t>(i % 3);
            const RadialKernel k(p, d);
            CHECK(bregman_integrand(k, normal_point(rng, d), normal_point(rng, d, 5.0), normal_point(rng, d, 5.0))
                  >= -1e-10);
        }
}

TEST_CASE("routes agree and hyvarinen closed form")
{
    const QuadratureConfig quad;
    const auto q = normal1(0, 1);
    const auto p = normal1(1, 1);
    const auto a = bregman_divergence(ScoringRule::hyvarinen(), *p, *q, quad);
    const auto b = divergence_via_integrand(RadialKernel(hyvarinen_profile(), 1), *p, *q, quad);
    const auto c = hyvarinen_divergence(*p, *q, quad);
    CHECK(agree(a, b));
    CHECK(agree(b, c));
    CHECK(std::abs(b.value - 1.0) <= b.tolerance());
    CHECK(b.method == DivergenceMethod::Integrand);
    CHECK(c.method == DivergenceMethod::ClosedForm);

    const auto la = bregman_divergence(ScoringRule::radial(logcosh_profile()), *p, *q, quad);
    const auto lb = divergence_via_integrand(RadialKernel(logcosh_profile(), 1), *p, *q, quad);
    CHECK(agree(la, lb));
    CHECK(std::abs(lb.value - 0.26179851863159676) <= 1e-10);

    CHECK(divergence_via_integrand(RadialKernel(logcosh_profile(), 1), *p, *p, quad).value == 0.0);
    CHECK(hyvarinen_divergence(*p, *p, quad).value == 0.0);
    CHECK(std::abs(hyvarinen_divergence(*normal1(0, 2), *q, quad).value - 0.25) <= 1e-12);

    CHECK(method_name(DivergenceMethod::ExpectedScore) == "expected-score");
    CHECK(method_name(DivergenceMethod::Integrand) == "integrand");
    CHECK(method_name(DivergenceMethod::ClosedForm) == "closed-form");
}

TEST_CASE("divergence term has mean zero")
{
    const QuadratureConfig quad;
    for (const auto& q : {normal1(0.3, 1.5), std::static_pointer_cast<const Density>(logistic_product(Vector::Zero(1), Vector::Ones(1)))})
        for (const auto& p : {hyvarinen_profile(), logcosh_profile()})
        {
            const auto r = divergence_term_mean(RadialKernel(p, 1), *q, quad);
            CHECK(std::abs(r.value) <= r.tolerance() + 1e-12);
        }
}

TEST_CASE("quadrature and Monte Carlo agree on divergences")
{
    const auto q = normal1(0, 1);
    const auto p = gaussian_mixture({0.5, 0.5}, {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                                    {Matrix::Identity(1, 1), Matrix::Identity(1, 1)});
    MonteCarloConfig mc;
    mc.samples = 200000;
    mc.seed = 21;
    for (const auto& prof : {hyvarinen_profile(), logcosh_profile()})
    {
        const RadialKernel k(prof, 1);
        CHECK(agree(divergence_via_integrand(k, *p, *q, QuadratureConfig{}), divergence_via_integrand(k, *p, *q, mc)));
        CHECK(agree(bregman_divergence(ScoringRule::radial(prof), *p, *q, QuadratureConfig{}),
                    bregman_divergence(ScoringRule::radial(prof), *p, *q, mc)));
    }
}

TEST_CASE("dimension mismatch is rejected")
{
    CHECK_THROWS_AS(hyvarinen_divergence(*normal1(0, 1), *gaussian_iso(Vector::Zero(2), 1.0), QuadratureConfig{}),
                    std::invalid_argument);
}
