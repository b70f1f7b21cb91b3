#include <doctest.h>

#include <cmath>
#include <set>

#include "scoring/numerics.hpp"
#include "scoring/scores.hpp"
#include "support.hpp"

using namespace scoring;
using namespace scoring::testing;

TEST_CASE("quadrature examples")
{
    const auto n1 = gaussian_iso(Vector::Zero(1), 1.0);
    const QuadratureConfig quad;
    const auto one = expect_quadrature([](const Vector&) { return 1.0; }, *n1, quad);
    CHECK(std::abs(one.value - 1.0) <= 1e-10);
    CHECK(one.engine == EngineKind::Quadrature);

    const auto fisher = expect_quadrature([&](const Vector& x) { return n1->grad_log_density(x).squaredNorm(); }, *n1, quad);
    CHECK(std::abs(fisher.value - 1.0) <= 1e-10);

    const auto n2 = gaussian_iso(Vector::Zero(1), 2.0);
    CHECK(std::abs(expect_quadrature([](const Vector& x) { return x[0] * x[0]; }, *n2, quad).value - 2.0) <= 1e-8);
}

TEST_CASE("quadrature error estimate covers node doubling")
{
    const std::vector<Family> fams = all_families();
    for (const auto& fam : fams)
    {
        if (fam.density->dim() > 2)
            continue;
        CAPTURE(fam.name);
        const Density& q = *fam.density;
        const std::vector<PointFunction> fns = {
            [](const Vector&) { return 1.0; },
            [](const Vector& x) { return x.squaredNorm(); },
            [&](const Vector& x) { return hyvarinen_score(q, x); },
        };
        QuadratureConfig coarse;
        coarse.nodes_per_axis = q.dim() == 2 ? 101 : 201;
        QuadratureConfig fine = coarse;
        fine.nodes_per_axis *= 2;
        for (const auto& fn : fns)
        {
            const auto a = expect_quadrature(fn, q, coarse);
            const auto b = expect_quadrature(fn, q, fine);
            CHECK(std::abs(a.value - b.value) <= a.error);
        }
    }
}

TEST_CASE("quadrature rejects what it cannot do")
{
    const auto n3 = gaussian_iso(Vector::Zero(3), 1.0);
    CHECK_THROWS_AS(expect_quadrature([](const Vector&) { return 1.0; }, *n3, QuadratureConfig{}), std::invalid_argument);
    const auto n1 = gaussian_iso(Vector::Zero(1), 1.0);
    CHECK_THROWS_WITH_AS(
        expect_quadrature([](const Vector& x) { return x[0] > 3 ? std::nan("") : 1.0; }, *n1, QuadratureConfig{}),
        doctest::Contains("x ="), std::domain_error);
    QuadratureConfig bounded;
    bounded.bounds = Box{Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)};
    const auto part = expect_quadrature([](const Vector&) { return 1.0; }, *n1, bounded);
    CHECK(part.value == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("monte carlo examples")
{
    const auto n2 = gaussian_iso(Vector::Zero(2), 1.0);
    MonteCarloConfig mc;
    const auto c = expect_mc([](const Vector&) { return 3.5; }, *n2, mc);
    CHECK(c.value == 3.5);
    CHECK(c.error == 0.0);
    const auto sq = expect_mc([](const Vector& x) { return x.squaredNorm(); }, *n2, mc);
    CHECK(agree(sq, 2.0));
    CHECK(sq.engine == EngineKind::MonteCarlo);
    CHECK(sq.tolerance() == 5.0 * sq.error);

    const auto p = gaussian_iso(Vector{{0.5, 0.0}}, 1.5);
    QuadratureConfig quad;
    quad.nodes_per_axis = 201;
    auto fn = [&](const Vector& x) { return hyvarinen_score(*p, x); };
    CHECK(agree(expect_mc(fn, *n2, mc), expect_quadrature(fn, *n2, quad)));
}

TEST_CASE("monte carlo is independent of chunking and threads")
{
    const auto q = all_families()[6].density;
    auto fn = [&](const Vector& x) { return hyvarinen_score(*q, x); };
    MonteCarloConfig base;
    base.samples = 30001;
    base.seed = 123;
    const auto ref = expect_mc(fn, *q, base);
    for (std::size_t chunk : {1u, 7u, 1000u, 100000u})
        for (std::size_t threads : {1u, 3u, 8u})
        {
            MonteCarloConfig c = base;
            c.chunk_size = chunk;
            c.threads = threads;
            const auto r = expect_mc(fn, *q, c);
            CHECK(r.value == ref.value);
            CHECK(r.error == ref.error);
        }
    MonteCarloConfig other = base;
    other.seed = 124;
    CHECK(expect_mc(fn, *q, other).value != ref.value);
}

TEST_CASE("substreams are distinct")
{
    std::set<std::uint64_t> firsts;
    for (std::uint64_t s = 0; s < 4; ++s)
        for (std::uint64_t i = 0; i < 1000; ++i)
            firsts.insert(Rng::substream(s, i)());
    CHECK(firsts.size() == 4000);
    Rng a = Rng::substream(9, 3);
    Rng b = Rng::substream(9, 3);
    for (int i = 0; i < 10; ++i)
        CHECK(a() == b());
    Rng u(1);
    for (int i = 0; i < 100000; ++i)
    {
        const double v = u.uniform_open();
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("parallel fill propagates exceptions")
{
    std::vector<double> out;
    CHECK_THROWS_AS(parallel_fill(
                        100, 10, 4,
                        [](std::size_t i) -> double {
                            if (i == 57)
                                throw std::runtime_error("boom");
                            return 1.0;
                        },
                        out),
                    std::runtime_error);
}

TEST_CASE("compensated sum and standard error")
{
    std::vector<double> v{1e16, 1.0, -1e16, 1.0};
    CHECK(compensated_sum(v) == 2.0);
    const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
    const auto me = mean_and_stderr(w);
    CHECK(me.mean == 2.5);
    CHECK(me.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)).epsilon(1e-15));
}

TEST_CASE("finite difference examples")
{
    Rng rng(2);
    const Vector a{{0.3, -1.2, 2.0}};
    for (int i = 0; i < 10; ++i)
    {
        const Vector x = normal_point(rng, 3, 3.0);
        const Vector g = fd_gradient([&](const Vector& y) { return a.dot(y); }, x);
        CHECK((g - a).cwiseAbs().maxCoeff() <= 1e-9);
        const Matrix h = fd_hessian([](const Vector& y) { return y.squaredNorm(); }, x);
        CHECK((h - 2.0 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK((h - h.transpose()).norm() == 0.0);
    }
    const auto n1 = gaussian_iso(Vector::Zero(1), 1.0);
    for (double x : {-3.0, 0.1, 2.0})
    {
        const Vector p = Vector::Constant(1, x);
        CHECK(std::abs(fd_gradient([&](const Vector& y) { return n1->log_density(y); }, p)[0] + x) <= 1e-6);
    }
    CHECK(StepPolicy::gradient().base == 1e-5);
    CHECK(StepPolicy::hessian().base == 1e-4);
}

TEST_CASE("engine descriptions")
{
    CHECK(describe(EngineConfig{QuadratureConfig{}}).find("quadrature") != std::string::npos);
    CHECK(describe(EngineConfig{MonteCarloConfig{}}).find("monte-carlo") != std::string::npos);
}
