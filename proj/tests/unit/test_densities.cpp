#include <doctest.h>

#include <cmath>
#include <numbers>

#include "scoring/numerics.hpp"
#include "support.hpp"

using namespace scoring;
using namespace scoring::testing;

TEST_CASE("gaussian examples")
{
    const auto g = gaussian_iso(Vector::Zero(1), 1.0);
    CHECK(g->grad_log_density(Vector::Constant(1, 2.0))[0] == doctest::Approx(-2.0).epsilon(1e-15));
    const auto shifted = gaussian_iso(Vector::Constant(1, 3.0), 1.0);
    for (double x : {-5.0, 0.0, 2.5})
        CHECK(shifted->hess_log_density(Vector::Constant(1, x))(0, 0) == -1.0);
    CHECK(g->log_density(Vector::Zero(1)) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-15));
}

TEST_CASE("gaussian: mean squared score equals the dimension")
{
    for (std::size_t d : {1u, 3u})
    {
        const auto g = gaussian_iso(Vector::Zero(static_cast<Eigen::Index>(d)), 1.0);
        MonteCarloConfig mc;
        mc.samples = 200000;
        mc.seed = 7;
        const auto r = expect_mc([&](const Vector& x) { return g->grad_log_density(x).squaredNorm(); }, *g, mc);
        CHECK(agree(r, static_cast<double>(d)));
    }
}

TEST_CASE("gaussian: invalid covariances are rejected")
{
    Matrix asym(2, 2);
    asym << 1, 0.5, 0.2, 1;
    CHECK_THROWS_AS(gaussian(Vector::Zero(2), asym), std::invalid_argument);
    Matrix indefinite(2, 2);
    indefinite << 1, 2, 2, 1;
    CHECK_THROWS_WITH_AS(gaussian(Vector::Zero(2), indefinite), doctest::Contains("not positive definite"),
                         std::invalid_argument);
    CHECK_THROWS_AS(gaussian(Vector::Zero(2), Matrix::Identity(3, 3)), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_iso(Vector::Zero(1), 0.0), std::invalid_argument);
}

TEST_CASE("mixture examples")
{
    const auto g = gaussian(Vector{{0.3, -0.2}}, spd2(1.2, 0.4, 0.9));
    const auto single = gaussian_mixture({1.0}, {g->mean()}, {g->cov()});
    Rng rng(3);
    for (int i = 0; i < 10; ++i)
    {
        const Vector x = normal_point(rng, 2, 2.0);
        CHECK(std::abs(single->log_density(x) - g->log_density(x)) <= 1e-12);
        CHECK(max_rel_err(single->grad_log_density(x), g->grad_log_density(x)) <= 1e-12);
        CHECK(max_rel_err(single->hess_log_density(x), g->hess_log_density(x)) <= 1e-12);
    }

    const auto sym = gaussian_mixture({0.5, 0.5}, {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                                      {Matrix::Identity(1, 1), Matrix::Identity(1, 1)});
    CHECK(std::abs(sym->grad_log_density(Vector::Zero(1))[0]) <= 1e-15);
    // Central differences of log p at h = 1e-5 (high-precision oracle).
    CHECK(sym->grad_log_density(Vector::Constant(1, 1.0))[0] == doctest::Approx(-0.23840584405489678).epsilon(1e-9));
    // Exactly -x + tanh(x).
    CHECK(sym->grad_log_density(Vector::Constant(1, 1.0))[0]
          == doctest::Approx(-1.0 + std::tanh(1.0)).epsilon(1e-14));
}

TEST_CASE("mixture: validation")
{
    const auto n = gaussian_iso(Vector::Zero(1), 1.0);
    CHECK_THROWS_AS(MixtureDensity({0.5, 0.4}, {n, n}), std::invalid_argument);
    CHECK_THROWS_AS(MixtureDensity({1.5, -0.5}, {n, n}), std::invalid_argument);
    CHECK_THROWS_AS(MixtureDensity({1.0}, {n, n}), std::invalid_argument);
    CHECK_THROWS_AS(MixtureDensity({0.5, 0.5}, {n, gaussian_iso(Vector::Zero(2), 1.0)}), std::invalid_argument);
}

TEST_CASE("mixture: far tails stay finite")
{
    const auto sym = gaussian_mixture({0.5, 0.5}, {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                                      {Matrix::Identity(1, 1), Matrix::Identity(1, 1)});
    for (double x : {-60.0, 45.0, 300.0})
    {
        const LocalData l = sym->local(Vector::Constant(1, x));
        CHECK(std::isfinite(l.log_density));
        CHECK(l.grad[0] == doctest::Approx(-(x - (x > 0 ? 1.0 : -1.0))).epsilon(1e-12));
        CHECK(l.hess(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("logistic examples")
{
    const auto l = logistic_product(Vector::Zero(1), Vector::Ones(1));
    CHECK(l->grad_log_density(Vector::Zero(1))[0] == 0.0);
    CHECK(l->log_density(Vector::Zero(1)) == doctest::Approx(-1.3862943611198906).epsilon(1e-15));
    const auto l2 = logistic_product(Vector{{0.5, -1.0}}, Vector{{0.5, 2.0}});
    const Vector x{{0.2, 0.9}};
    const Matrix h = l2->hess_log_density(x);
    CHECK(h(0, 1) == 0.0);
    CHECK(h(1, 0) == 0.0);
    const Matrix fd = fd_jacobian([&](const Vector& y) { return l2->grad_log_density(y); }, x);
    CHECK(max_rel_err(h, fd) <= 1e-4);
    CHECK(std::isfinite(l->log_density(Vector::Constant(1, 800.0))));
    CHECK_THROWS_AS(logistic_product(Vector::Zero(1), Vector::Zero(1)), std::invalid_argument);
}

TEST_CASE("kde examples")
{
    const std::vector<Vector> one{Vector::Zero(2)};
    const auto k1 = kde(one, 1.0);
    const auto g = gaussian_iso(Vector::Zero(2), 1.0);
    Rng rng(11);
    for (int i = 0; i < 10; ++i)
    {
        const Vector x = normal_point(rng, 2, 2.0);
        CHECK(std::abs(k1->log_density(x) - g->log_density(x)) <= 1e-12);
        CHECK(max_rel_err(k1->grad_log_density(x), g->grad_log_density(x)) <= 1e-12);
    }

    const std::vector<Vector> two{Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)};
    const auto k2 = kde(two, 1.0);
    const auto sym = gaussian_mixture({0.5, 0.5}, {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                                      {Matrix::Identity(1, 1), Matrix::Identity(1, 1)});
    for (double x : {-2.0, 0.0, 0.7, 3.0})
    {
        const Vector p = Vector::Constant(1, x);
        CHECK(std::abs(k2->log_density(p) - sym->log_density(p)) <= 1e-12);
        CHECK(std::abs(k2->grad_log_density(p)[0] - sym->grad_log_density(p)[0]) <= 1e-12);
    }

    CHECK_THROWS_AS(kde(two, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kde(std::vector<Vector>{}, 1.0), std::invalid_argument);
}

TEST_CASE("mixture_path examples")
{
    const auto q = gaussian_iso(Vector::Zero(1), 1.0);
    const auto p = gaussian_iso(Vector::Constant(1, 1.0), 1.0);
    const auto p0 = mixture_path(q, p, 0.0);
    const auto p1 = mixture_path(q, p, 1.0);
    Rng rng(5);
    for (int i = 0; i < 10; ++i)
    {
        const Vector x = normal_point(rng, 1, 2.0);
        CHECK(p0->log_density(x) == doctest::Approx(q->log_density(x)).epsilon(1e-14));
        CHECK(p1->grad_log_density(x)[0] == doctest::Approx(p->grad_log_density(x)[0]).epsilon(1e-14));
    }
    CHECK(mixture_path(q, p, 0.5)->log_density(Vector::Zero(1))
          == doctest::Approx(-1.1380087295845114).epsilon(1e-14));
    CHECK_THROWS_AS(mixture_path(q, p, 1.5), std::invalid_argument);
}

TEST_CASE("derivative invariants hold for every family")
{
    Rng rng(2024);
    for (const auto& fam : all_families())
    {
        CAPTURE(fam.name);
        const Density& d = *fam.density;
        for (int i = 0; i < 100; ++i)
        {
            const Vector x = normal_point(rng, d.dim(), 2.0);
            CAPTURE(x.transpose());
            const LocalData l = d.local(x);
            REQUIRE(std::isfinite(l.log_density));
            CHECK(l.log_density == doctest::Approx(d.log_density(x)).epsilon(1e-13));
            CHECK(max_rel_err(l.grad, d.grad_log_density(x)) <= 1e-13);
            CHECK(max_rel_err(l.hess, d.hess_log_density(x)) <= 1e-13);
            CHECK((l.hess - l.hess.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
            const Vector fd_g = fd_gradient([&](const Vector& y) { return d.log_density(y); }, x);
            CHECK(max_rel_err(l.grad, fd_g) <= 1e-5);
            const Matrix fd_h = fd_jacobian([&](const Vector& y) { return d.grad_log_density(y); }, x);
            CHECK(max_rel_err(l.hess, fd_h) <= 1e-4);
        }
    }
}

TEST_CASE("mixture Hessian identity")
{
    const auto mix = std::dynamic_pointer_cast<const MixtureDensity>(all_families()[6].density);
    REQUIRE(mix);
    Rng rng(9);
    for (int i = 0; i < 20; ++i)
    {
        const Vector x = normal_point(rng, 2, 2.0);
        std::vector<double> logs;
        for (std::size_t k = 0; k < mix->components().size(); ++k)
            logs.push_back(std::log(mix->weights()[k]) + mix->components()[k]->log_density(x));
        const double top = *std::max_element(logs.begin(), logs.end());
        double total = 0.0;
        for (double v : logs)
            total += std::exp(v - top);
        Vector m = Vector::Zero(2);
        Matrix h = Matrix::Zero(2, 2);
        for (std::size_t k = 0; k < logs.size(); ++k)
        {
            const double r = std::exp(logs[k] - top) / total;
            const Vector s = mix->components()[k]->grad_log_density(x);
            m += r * s;
            h += r * (mix->components()[k]->hess_log_density(x) + s * s.transpose());
        }
        h -= m * m.transpose();
        CHECK(max_rel_err(mix->grad_log_density(x), m) <= 1e-12);
        CHECK(max_rel_err(mix->hess_log_density(x), h) <= 1e-12);
    }
}

TEST_CASE("score has mean zero under sampling")
{
    for (const auto& fam : all_families())
    {
        CAPTURE(fam.name);
        const auto draws = sample(*fam.density, 100000, 17);
        const auto d = static_cast<Eigen::Index>(fam.density->dim());
        for (Eigen::Index j = 0; j < d; ++j)
        {
            std::vector<double> comp;
            for (const auto& x : draws)
                comp.push_back(fam.density->grad_log_density(x)[j]);
            const MeanAndError me = mean_and_stderr(comp);
            CHECK(std::abs(me.mean) <= 5.0 * me.stderr_);
        }
    }
}

TEST_CASE("sampling examples")
{
    const auto g = gaussian_iso(Vector::Zero(1), 1.0);
    const auto draws = sample(*g, 100000, 1);
    std::vector<double> xs;
    for (const auto& x : draws)
        xs.push_back(x[0]);
    const MeanAndError me = mean_and_stderr(xs);
    CHECK(std::abs(me.mean) <= 5.0 * me.stderr_);

    const auto a = sample(*g, 50, 42);
    const auto b = sample(*g, 50, 42);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i][0] == b[i][0]);
    // Draw i depends only on (seed, i).
    const auto longer = sample(*g, 80, 42);
    CHECK(longer[49][0] == a[49][0]);

    const auto mix = gaussian_mixture({0.2, 0.8}, {Vector::Constant(1, -50.0), Vector::Constant(1, 50.0)},
                                      {Matrix::Identity(1, 1), Matrix::Identity(1, 1)});
    const std::size_t n = 100000;
    const auto md = sample(*mix, n, 3);
    const double left = static_cast<double>(std::count_if(md.begin(), md.end(), [](const Vector& x) { return x[0] < 0; }));
    const double sd = std::sqrt(n * 0.2 * 0.8);
    CHECK(std::abs(left - 0.2 * n) <= 5.0 * sd);
}

TEST_CASE("densities without a sampler say so")
{
    struct Flat final : Density
    {
        std::size_t dim() const override { return 1; }
        double log_density(const Vector& x) const override { return -0.5 * x.squaredNorm(); }
        Vector grad_log_density(const Vector& x) const override { return -x; }
        Matrix hess_log_density(const Vector&) const override { return -Matrix::Identity(1, 1); }
        Box support_box(double m) const override { return {Vector::Constant(1, -m), Vector::Constant(1, m)}; }
        std::string describe() const override { return "flat"; }
    } flat;
    CHECK_THROWS_WITH_AS(sample(flat, 3, 0), doctest::Contains("quadrature"), std::logic_error);
}

TEST_CASE("scaled density forwards derivatives exactly")
{
    const auto base = all_families()[6].density;
    const ScaledDensity scaled(base, 10.0);
    const Vector x{{0.3, -0.7}};
    CHECK(scaled.log_density(x) == doctest::Approx(base->log_density(x) + std::log(10.0)).epsilon(1e-15));
    CHECK((scaled.grad_log_density(x) - base->grad_log_density(x)).norm() == 0.0);
    CHECK((scaled.hess_log_density(x) - base->hess_log_density(x)).norm() == 0.0);
    CHECK_THROWS_AS(ScaledDensity(base, -1.0), std::invalid_argument);
}

TEST_CASE("leave-one-out reweighting matches a refit without the point")
{
    std::vector<Vector> pts;
    Rng rng(4);
    for (int i = 0; i < 6; ++i)
        pts.push_back(normal_point(rng, 2));
    const auto full = kde(pts, 0.7);
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        std::vector<Vector> rest = pts;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        const auto refit = kde(rest, 0.7);
        const MixtureDensity loo = full->leave_one_out(i);
        const Vector x = normal_point(rng, 2);
        CHECK(loo.log_density(x) == doctest::Approx(refit->log_density(x)).epsilon(1e-13));
        CHECK(max_rel_err(loo.grad_log_density(x), refit->grad_log_density(x)) <= 1e-12);
        CHECK(max_rel_err(loo.hess_log_density(x), refit->hess_log_density(x)) <= 1e-12);
    }
}
