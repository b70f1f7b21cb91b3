#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "scoring/crossval.hpp"
#include "scoring/divergences.hpp"
#include "scoring/experiments.hpp"
#include "scoring/simd/iso_mixture.hpp"
#include "scoring/sure.hpp"

namespace scoring::experiments {

using nlohmann::json;

namespace {

std::string format_point(const Vector& x)
{
    std::string out;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out += (i ? ";" : "") + format_number(x[i]);
    return out;
}

std::vector<Vector> points_from(const json& v)
{
    std::vector<Vector> out;
    for (const auto& p : v)
    {
        const auto coords = p.get<std::vector<double>>();
        out.push_back(Eigen::Map<const Vector>(coords.data(), static_cast<Eigen::Index>(coords.size())));
    }
    return out;
}

EngineConfig default_engine(std::size_t dim, std::uint64_t seed, std::size_t threads)
{
    if (dim <= 2)
    {
        QuadratureConfig q;
        q.threads = threads;
        if (dim == 2)
            q.nodes_per_axis = 201;
        return q;
    }
    MonteCarloConfig m;
    m.seed = seed;
    m.threads = threads;
    return m;
}

EngineConfig engine_from(const ExperimentConfig& config, std::size_t dim, std::uint64_t seed)
{
    if (config.body.contains("engine"))
        return parse_engine(config.body["engine"], seed, config.threads, "/engine");
    return default_engine(dim, seed, config.threads);
}

//---------------------------------------------------------------------------//

RunResult run_score_eval(const ExperimentConfig& config)
{
    RunResult result;
    std::ostringstream out;
    out << "density,rule,x,score\n";
    const auto points = points_from(config.body["points"]);
    for (std::size_t di = 0; di < config.body["densities"].size(); ++di)
    {
        const json& dspec = config.body["densities"][di];
        const DensityPtr density = parse_density(dspec, fmt::format("/densities/{}", di));
        const std::string label = density_label(dspec, *density);
        for (std::size_t ri = 0; ri < config.body["rules"].size(); ++ri)
        {
            const ScoringRule rule = parse_rule(config.body["rules"][ri], fmt::format("/rules/{}", ri), density->dim());
            const KernelPtr kernel = rule.kernel_based() ? rule.kernel(density->dim()) : nullptr;
            for (const auto& x : points)
            {
                const LocalData local = density->local(x);
                const double s = rule.evaluate(x, local);
                out << fmt::format("\"{}\",{},{},{}\n", label, rule.name(), format_point(x), format_number(s));
                if (kernel)
                {
                    const double g = general_score(*kernel, x, local);
                    if (!(std::abs(g - s) <= 1e-9))
                        result.failures.push_back(fmt::format("score path mismatch for {} / {} at x = {}: {} vs {}",
                                                              label, rule.name(), format_point(x), s, g));
                }
            }
        }
    }
    result.table = out.str();
    return result;
}

RunResult run_divergence_table(const ExperimentConfig& config)
{
    RunResult result;
    std::ostringstream out;
    out << "p,q,kernel,route,value,error\n";
    const json& pairs = config.body["pairs"];
    for (std::size_t i = 0; i < pairs.size(); ++i)
    {
        const DensityPtr p = parse_density(pairs[i]["p"], fmt::format("/pairs/{}/p", i));
        const DensityPtr q = parse_density(pairs[i]["q"], fmt::format("/pairs/{}/q", i));
        const std::string p_label = density_label(pairs[i]["p"], *p);
        const std::string q_label = density_label(pairs[i]["q"], *q);
        const EngineConfig engine = engine_from(config, q->dim(), config.seed);
        for (std::size_t k = 0; k < config.body["kernels"].size(); ++k)
        {
            const RadialProfile profile = parse_profile(config.body["kernels"][k], fmt::format("/kernels/{}", k));
            const KernelPtr kernel = radial_kernel(profile, q->dim());
            const ScoringRule rule = ScoringRule::radial(profile);

            std::vector<DivergenceResult> routes;
            routes.push_back(bregman_divergence(rule, *p, *q, engine));
            routes.push_back(divergence_via_integrand(*kernel, *p, *q, engine));
            if (profile.name() == "hyvarinen")
                routes.push_back(hyvarinen_divergence(*p, *q, engine));

            for (const auto& r : routes)
            {
                out << fmt::format("\"{}\",\"{}\",{},{},{},{}\n", p_label, q_label, profile.name(),
                                   method_name(r.method), format_number(r.value), format_number(r.error));
                if (profile.concave_on_grid() && r.value < -r.tolerance())
                    result.failures.push_back(fmt::format("negative divergence {} ({}) for {} vs {} with {}", r.value,
                                                          method_name(r.method), p_label, q_label, profile.name()));
            }
            for (std::size_t a = 1; a < routes.size(); ++a)
                if (profile.concave_on_grid() && !agree(routes[0], routes[a]))
                    result.failures.push_back(fmt::format("routes disagree for {} vs {} with {}: {} vs {}", p_label,
                                                          q_label, profile.name(), routes[0].value, routes[a].value));
        }
    }
    result.table = out.str();
    return result;
}

DensityPtr marginal_from(const json& prior, std::size_t dim)
{
    if (prior.contains("variance"))
        return gaussian_prior_marginal({1.0}, {Vector::Zero(static_cast<Eigen::Index>(dim))},
                                       {prior["variance"].get<double>()});
    return gaussian_prior_marginal(prior["weights"].get<std::vector<double>>(), points_from(prior["means"]),
                                   prior["variances"].get<std::vector<double>>());
}

RunResult run_sure(const ExperimentConfig& config)
{
    RunResult result;
    const auto dim = config.body["dim"].get<std::size_t>();
    const DensityPtr marginal = marginal_from(config.body["prior"], dim);
    const ShiftEstimator estimator = posterior_mean_estimator(marginal);

    std::vector<Vector> thetas;
    if (config.body.contains("thetas"))
        thetas = points_from(config.body["thetas"]);
    else
        for (std::size_t i = 0; i < config.body["truths"].size(); ++i)
        {
            const auto g = parse_density(config.body["truths"][i], fmt::format("/truths/{}", i));
            thetas.push_back(ShiftModel::from_gaussian(dynamic_cast<const Gaussian&>(*g)).theta);
        }

    MonteCarloConfig mc;
    mc.samples = config.body.contains("samples") ? config.body["samples"].get<std::size_t>() : 1000000;
    mc.seed = config.seed;
    mc.threads = config.threads;
    const EngineConfig engine = engine_from(config, dim, config.seed + 1);

    std::ostringstream out;
    out << "dim,theta,mc_risk,mc_risk_stderr,sure_mean,sure_stderr,difference_mean,difference_stderr,"
           "divergence,divergence_error,pass\n";
    for (const auto& theta : thetas)
    {
        const UnbiasednessReport r = unbiasedness_experiment(estimator, theta, mc, marginal, engine);
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", dim, format_point(theta), format_number(r.risk.mean),
                           format_number(r.risk.stderr_), format_number(r.sure.mean), format_number(r.sure.stderr_),
                           format_number(r.difference.mean), format_number(r.difference.stderr_),
                           format_number(r.divergence->value), format_number(r.divergence->error),
                           r.success ? 1 : 0);
        if (!r.success)
            result.failures.push_back(fmt::format("SURE unbiasedness failed at theta = {}", format_point(theta)));
    }
    result.table = out.str();
    return result;
}

RunResult run_bandwidth(const ExperimentConfig& config)
{
    RunResult result;
    std::vector<Vector> samples;
    if (config.body.contains("samples"))
        samples = points_from(config.body["samples"]);
    else
    {
        std::ifstream in(config.base_dir / config.body["samples_file"].get<std::string>());
        samples = read_samples(in);
    }
    const std::size_t dim = static_cast<std::size_t>(samples.front().size());
    const ScoringRule rule = parse_rule(config.body["rule"], "/rule", dim);
    const auto grid = config.body["grid"].get<std::vector<double>>();
    DensityPtr truth;
    if (config.body.contains("truth"))
        truth = parse_density(config.body["truth"], "/truth");
    const EngineConfig engine = engine_from(config, dim, config.seed);

    const CvReport report = select_bandwidth(rule, samples, grid, truth.get(), engine);
    for (std::size_t i = 0; i < report.cv_risk.size(); ++i)
        if (!std::isfinite(report.cv_risk[i]))
            result.failures.push_back(fmt::format("non-finite cross-validated risk at bandwidth {}", grid[i]));
    std::ostringstream out;
    write_cv_report(out, report);
    result.table = out.str();
    return result;
}

//---------------------------------------------------------------------------//
// Check suite. Quick versions of the library's invariants; each row is
// (check, measured value, tolerance, pass).

struct CheckRow
{
    std::string name;
    double value;
    double tolerance;
    bool pass;
};

struct Family
{
    std::string name;
    DensityPtr density;
};

std::vector<Family> builtin_families()
{
    Matrix cov2(2, 2);
    cov2 << 1.5, 0.3, 0.3, 0.8;
    Matrix cov2b(2, 2);
    cov2b << 0.6, -0.2, -0.2, 1.1;
    std::vector<Vector> kde_points;
    for (int i = 0; i < 7; ++i)
        kde_points.push_back(Vector{{std::sin(1.3 * i), std::cos(0.7 * i)}});
    return {
        {"gaussian-1d", gaussian_iso(Vector::Constant(1, 0.3), 1.0)},
        {"gaussian-2d", gaussian(Vector{{0.5, -1.0}}, cov2)},
        {"logistic-1d", logistic_product(Vector::Constant(1, 0.0), Vector::Constant(1, 1.0))},
        {"logistic-2d", logistic_product(Vector{{0.2, -0.4}}, Vector{{0.7, 1.3}})},
        {"mixture-1d", gaussian_mixture({0.5, 0.5}, {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                                        {Matrix::Identity(1, 1), Matrix::Identity(1, 1)})},
        {"mixture-2d", gaussian_mixture({0.3, 0.7}, {Vector{{-1.0, 0.5}}, Vector{{1.0, 0.0}}}, {cov2, cov2b})},
        {"kde-2d", kde(kde_points, 0.6)},
    };
}

Vector random_point(Rng& rng, std::size_t dim, double scale)
{
    std::normal_distribution<double> normal(0.0, scale);
    Vector x(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x[i] = normal(rng);
    return x;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double max_rel_err(const Matrix& a, const Matrix& b)
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        worst = std::max(worst, rel_err(a.data()[i], b.data()[i]));
    return worst;
}

void check_score_paths(std::uint64_t seed, std::vector<CheckRow>& rows)
{
    Rng rng(seed);
    const auto families = builtin_families();
    double hyv_radial = 0.0;
    double hyv_general = 0.0;
    double logcosh_paths = 0.0;
    for (int i = 0; i < 200; ++i)
    {
        const auto& fam = families[static_cast<std::size_t>(i) % families.size()];
        const Vector x = random_point(rng, fam.density->dim(), 1.5);
        const LocalData local = fam.density->local(x);
        const double h = hyvarinen_score(x, local);
        hyv_radial = std::max(hyv_radial, std::abs(radial_score(hyvarinen_profile(), x, local) - h));
        const RadialKernel hk(hyvarinen_profile(), fam.density->dim());
        hyv_general = std::max(hyv_general, std::abs(general_score(hk, x, local) - h));
        const RadialKernel lk(logcosh_profile(), fam.density->dim());
        logcosh_paths = std::max(logcosh_paths,
                                 std::abs(general_score(lk, x, local) - radial_score(logcosh_profile(), x, local)));
    }
    rows.push_back({"score-paths:hyvarinen-radial", hyv_radial, 1e-10, hyv_radial <= 1e-10});
    rows.push_back({"score-paths:hyvarinen-general", hyv_general, 1e-9, hyv_general <= 1e-9});
    rows.push_back({"score-paths:logcosh-general-radial", logcosh_paths, 1e-9, logcosh_paths <= 1e-9});
}

void check_sure_identity(std::uint64_t seed, std::vector<CheckRow>& rows)
{
    Rng rng(seed);
    double worst = 0.0;
    for (const auto& fam : builtin_families())
        for (int i = 0; i < 30; ++i)
        {
            const Vector x = random_point(rng, fam.density->dim(), 1.5);
            const double d = static_cast<double>(fam.density->dim());
            worst = std::max(worst, std::abs(sure_log_form(*fam.density, x) - (hyvarinen_score(*fam.density, x) + d)));
        }
    rows.push_back({"sure-identity", worst, 1e-12, worst <= 1e-12});
}

void check_sure_unbiasedness(std::uint64_t seed, std::size_t threads, std::vector<CheckRow>& rows)
{
    const DensityPtr f = gaussian_prior_marginal({1.0}, {Vector::Zero(1)}, {1.0});
    MonteCarloConfig mc;
    mc.samples = 100000;
    mc.seed = seed;
    mc.threads = threads;
    const auto r = unbiasedness_experiment(posterior_mean_estimator(f), Vector::Zero(1), mc, f);
    rows.push_back({"sure-unbiasedness:difference", r.difference.mean, r.difference_tolerance, r.success});
    const double dev = std::abs(r.divergence->value - 0.25);
    rows.push_back({"sure-unbiasedness:divergence-0.25", dev, r.divergence->tolerance() + 1e-12,
                    dev <= r.divergence->tolerance() + 1e-12});
}

void check_risk_identity(std::uint64_t seed, std::size_t threads, std::vector<CheckRow>& rows)
{
    const DensityPtr f = gaussian_prior_marginal({0.4, 0.6}, {Vector::Constant(1, -1.5), Vector::Constant(1, 1.0)},
                                                 {0.5, 1.0});
    MonteCarloConfig mc;
    mc.samples = 200000;
    mc.seed = seed;
    mc.threads = threads;
    for (double t : {0.0, 1.0})
    {
        const Vector theta = Vector::Constant(1, t);
        const auto risk = quadratic_risk_mc(posterior_mean_estimator(f), theta, mc);
        const auto dhs = hyvarinen_divergence(*f, *gaussian_iso(theta, 1.0), QuadratureConfig{});
        const double gap = std::abs(risk.value - dhs.value);
        const double tol = risk.tolerance() + dhs.tolerance();
        rows.push_back({fmt::format("risk-equals-divergence:theta={}", t), gap, tol, gap <= tol});
    }
}

void check_routes(std::vector<CheckRow>& rows)
{
    const auto q = gaussian_iso(Vector::Zero(1), 1.0);
    const std::vector<Family> forecasts = {
        {"N(1,1)", gaussian_iso(Vector::Constant(1, 1.0), 1.0)},
        {"N(0,2)", gaussian_iso(Vector::Zero(1), 2.0)},
        {"mixture", gaussian_mixture({0.5, 0.5}, {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                                     {Matrix::Identity(1, 1), Matrix::Identity(1, 1)})},
    };
    for (const auto& profile : {hyvarinen_profile(), logcosh_profile()})
        for (const auto& p : forecasts)
        {
            const QuadratureConfig engine;
            const auto a = bregman_divergence(ScoringRule::radial(profile), *p.density, *q, engine);
            const auto b = divergence_via_integrand(RadialKernel(profile, 1), *p.density, *q, engine);
            const double gap = std::abs(a.value - b.value);
            const double tol = a.tolerance() + b.tolerance();
            rows.push_back({fmt::format("route-equivalence:{}:{}", profile.name(), p.name), gap, tol, gap <= tol});
        }
}

void check_nonnegativity(std::uint64_t seed, std::vector<CheckRow>& rows)
{
    Rng rng(seed);
    for (const auto& profile : {hyvarinen_profile(), logcosh_profile()})
    {
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 10000; ++i)
        {
            const std::size_t d = 1 + static_cast<std::size_t>(i % 3);
            const RadialKernel k(profile, d);
            const Vector x = random_point(rng, d, 1.0);
            worst = std::min(worst, bregman_integrand(k, x, random_point(rng, d, 3.0), random_point(rng, d, 3.0)));
        }
        rows.push_back({"integrand-nonnegativity:" + profile.name(), worst, -1e-10, worst >= -1e-10});
    }
}

void check_normalization(std::uint64_t seed, std::vector<CheckRow>& rows)
{
    Rng rng(seed);
    double mismatches = 0.0;
    const std::vector<ScoringRule> rules = {ScoringRule::hyvarinen(), ScoringRule::radial(logcosh_profile()),
                                            ScoringRule::radial(hyvarinen_profile())};
    for (const auto& fam : builtin_families())
        for (double c : {0.1, 10.0})
        {
            const ScaledDensity scaled(fam.density, c);
            for (int i = 0; i < 20; ++i)
            {
                const Vector x = random_point(rng, fam.density->dim(), 1.5);
                for (const auto& rule : rules)
                    if (rule(*fam.density, x) != rule(scaled, x))
                        mismatches += 1.0;
            }
        }
    rows.push_back({"normalization-invariance:mismatches", mismatches, 0.0, mismatches == 0.0});
}

void check_phi_concavity(std::vector<CheckRow>& rows)
{
    const DensityPtr q = gaussian_iso(Vector::Zero(1), 1.0);
    const DensityPtr p = gaussian_iso(Vector::Constant(1, 1.0), 1.0);
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i)
        grid.push_back(0.1 * i);
    for (const auto& profile : {hyvarinen_profile(), logcosh_profile()})
    {
        const auto r = phi_path_concavity(RadialKernel(profile, 1), q, p, grid, QuadratureConfig{});
        double worst = -std::numeric_limits<double>::infinity();
        double tol = 0.0;
        for (std::size_t i = 0; i < r.second_differences.size(); ++i)
            if (r.second_differences[i] - r.tolerances[i] > worst - tol)
            {
                worst = r.second_differences[i];
                tol = r.tolerances[i];
            }
        rows.push_back({"phi-concavity:" + profile.name(), worst, tol, r.concave});
    }
}

void check_cv_unbiasedness(std::uint64_t seed, std::size_t threads, std::vector<CheckRow>& rows)
{
    const auto q = gaussian_iso(Vector::Zero(1), 1.0);
    QuadratureConfig engine;
    engine.nodes_per_axis = 201;
    const auto r = cv_replication_experiment(ScoringRule::hyvarinen(), *q, 20, 0.5, 60, seed, engine, threads);
    rows.push_back({"cv-unbiasedness:hyvarinen", r.difference.mean, 5.0 * r.difference.stderr_, r.success});
}

void check_derivatives(std::uint64_t seed, std::vector<CheckRow>& rows)
{
    Rng rng(seed);
    for (const auto& fam : builtin_families())
    {
        double grad_err = 0.0;
        double hess_err = 0.0;
        for (int i = 0; i < 20; ++i)
        {
            const Vector x = random_point(rng, fam.density->dim(), 1.5);
            const auto& dens = *fam.density;
            grad_err = std::max(grad_err,
                                max_rel_err(dens.grad_log_density(x),
                                            fd_gradient([&](const Vector& y) { return dens.log_density(y); }, x)));
            hess_err = std::max(
                hess_err, max_rel_err(dens.hess_log_density(x),
                                      fd_jacobian([&](const Vector& y) { return dens.grad_log_density(y); }, x)));
        }
        rows.push_back({"derivative-oracles:grad:" + fam.name, grad_err, 1e-5, grad_err <= 1e-5});
        rows.push_back({"derivative-oracles:hess:" + fam.name, hess_err, 1e-4, hess_err <= 1e-4});
    }
}

void check_simd(std::uint64_t seed, std::vector<CheckRow>& rows)
{
    if (!simd::backend_available(simd::Backend::Avx2))
    {
        rows.push_back({"simd-equivalence:avx2-unavailable", 0.0, 0.0, true});
        return;
    }
    Rng rng(seed);
    std::vector<Vector> pts;
    for (int i = 0; i < 37; ++i)
        pts.push_back(random_point(rng, 2, 1.0));
    const auto density = kde(pts, 0.4);
    const simd::Backend before = simd::active_backend();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
    {
        const Vector x = random_point(rng, 2, 2.0);
        simd::set_backend(simd::Backend::Scalar);
        const LocalData a = density->local(x);
        simd::set_backend(simd::Backend::Avx2);
        const LocalData b = density->local(x);
        worst = std::max({worst, rel_err(b.log_density, a.log_density), max_rel_err(b.grad, a.grad),
                          max_rel_err(b.hess, a.hess)});
    }
    simd::set_backend(before);
    rows.push_back({"simd-equivalence:kde-2d", worst, 1e-12, worst <= 1e-12});
}

void check_quadrature_normalization(std::vector<CheckRow>& rows)
{
    for (const auto& fam : builtin_families())
    {
        const auto r = expect_quadrature([](const Vector&) { return 1.0; }, *fam.density, QuadratureConfig{});
        const double dev = std::abs(r.value - 1.0);
        rows.push_back({"quadrature-normalization:" + fam.name, dev, 1e-9, dev <= 1e-9});
    }
}

void check_mc_reproducibility(std::uint64_t seed, std::vector<CheckRow>& rows)
{
    const auto q = gaussian_iso(Vector::Zero(2), 1.0);
    auto fn = [](const Vector& x) { return x.squaredNorm(); };
    MonteCarloConfig a;
    a.samples = 50000;
    a.seed = seed;
    a.chunk_size = 1000;
    MonteCarloConfig b = a;
    b.chunk_size = 8192;
    b.threads = 2;
    const auto ra = expect_mc(fn, *q, a);
    const auto rb = expect_mc(fn, *q, b);
    const bool same = ra.value == rb.value && ra.error == rb.error;
    rows.push_back({"mc-reproducibility", std::abs(ra.value - rb.value), 0.0, same});
}

using CheckFn = std::function<void(std::uint64_t, std::size_t, std::vector<CheckRow>&)>;

const std::vector<std::pair<std::string, CheckFn>>& registry()
{
    static const std::vector<std::pair<std::string, CheckFn>> checks = {
        {"score-paths", [](auto s, auto, auto& r) { check_score_paths(s, r); }},
        {"sure-identity", [](auto s, auto, auto& r) { check_sure_identity(s, r); }},
        {"sure-unbiasedness", [](auto s, auto t, auto& r) { check_sure_unbiasedness(s, t, r); }},
        {"risk-equals-divergence", [](auto s, auto t, auto& r) { check_risk_identity(s, t, r); }},
        {"route-equivalence", [](auto, auto, auto& r) { check_routes(r); }},
        {"integrand-nonnegativity", [](auto s, auto, auto& r) { check_nonnegativity(s, r); }},
        {"normalization-invariance", [](auto s, auto, auto& r) { check_normalization(s, r); }},
        {"phi-concavity", [](auto, auto, auto& r) { check_phi_concavity(r); }},
        {"cv-unbiasedness", [](auto s, auto t, auto& r) { check_cv_unbiasedness(s, t, r); }},
        {"derivative-oracles", [](auto s, auto, auto& r) { check_derivatives(s, r); }},
        {"simd-equivalence", [](auto s, auto, auto& r) { check_simd(s, r); }},
        {"quadrature-normalization", [](auto, auto, auto& r) { check_quadrature_normalization(r); }},
        {"mc-reproducibility", [](auto s, auto, auto& r) { check_mc_reproducibility(s, r); }},
    };
    return checks;
}

RunResult run_check_suite(const ExperimentConfig& config)
{
    std::vector<std::string> selected;
    if (config.body.contains("checks"))
        selected = config.body["checks"].get<std::vector<std::string>>();
    else
        selected = check_names();

    std::vector<CheckRow> rows;
    for (const auto& [name, fn] : registry())
        if (std::find(selected.begin(), selected.end(), name) != selected.end())
            fn(config.seed, config.threads, rows);

    RunResult result;
    std::ostringstream out;
    out << "check,value,tolerance,pass\n";
    for (const auto& row : rows)
    {
        out << fmt::format("{},{},{},{}\n", row.name, format_number(row.value), format_number(row.tolerance),
                           row.pass ? 1 : 0);
        if (!row.pass)
            result.failures.push_back(fmt::format("check {} failed: value {} vs tolerance {}", row.name,
                                                  row.value, row.tolerance));
    }
    result.table = out.str();
    return result;
}

}  // namespace

std::vector<std::string> check_names()
{
    std::vector<std::string> names;
    for (const auto& entry : registry())
        names.push_back(entry.first);
    return names;
}

RunResult run(const ExperimentConfig& config)
{
    RunResult result;
    switch (config.kind)
    {
    case ExperimentKind::ScoreEval: result = run_score_eval(config); break;
    case ExperimentKind::DivergenceTable: result = run_divergence_table(config); break;
    case ExperimentKind::SureExperiment: result = run_sure(config); break;
    case ExperimentKind::Bandwidth: result = run_bandwidth(config); break;
    case ExperimentKind::CheckSuite: result = run_check_suite(config); break;
    }
    result.exit_code = result.failures.empty() ? kExitOk : kExitCheckFailed;
    return result;
}

}  // namespace scoring::experiments
