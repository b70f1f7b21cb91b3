#include "scoring/sure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "scoring/divergences.hpp"

namespace scoring {

ShiftEstimator::ShiftEstimator(std::size_t dim, Shift g, std::optional<Divergence> div_g, std::string name)
    : dim_(dim), g_(std::move(g)), div_g_(std::move(div_g)), name_(std::move(name))
{
    if (dim_ == 0)
        throw std::invalid_argument("shift estimator: dimension must be positive");
    if (!g_)
        throw std::invalid_argument("shift estimator: empty shift function");
}

Vector ShiftEstimator::shift(const Vector& x) const
{
    Vector g = g_(x);
    if (static_cast<std::size_t>(g.size()) != dim_ || !g.allFinite())
        throw std::domain_error(fmt::format("shift estimator '{}': g(x) is non-finite or has the wrong size", name_));
    return g;
}

double ShiftEstimator::divergence(const Vector& x) const
{
    const double v = div_g_ ? (*div_g_)(x) : fd_jacobian(g_, x).trace();
    if (!std::isfinite(v))
        throw std::domain_error(fmt::format("shift estimator '{}': non-finite divergence", name_));
    return v;
}

ShiftEstimator posterior_mean_estimator(DensityPtr marginal)
{
    if (!marginal)
        throw std::invalid_argument("posterior_mean_estimator: null marginal density");
    const std::size_t d = marginal->dim();
    return ShiftEstimator(
        d, [marginal](const Vector& x) { return marginal->grad_log_density(x); },
        [marginal](const Vector& x) { return marginal->hess_log_density(x).trace(); },
        "posterior-mean[" + marginal->describe() + "]");
}

ShiftEstimator identity_estimator(std::size_t dim)
{
    const auto d = static_cast<Eigen::Index>(dim);
    return ShiftEstimator(
        dim, [d](const Vector&) { return Vector::Zero(d); }, [](const Vector&) { return 0.0; }, "identity");
}

ShiftEstimator zero_estimator(std::size_t dim)
{
    const double d = static_cast<double>(dim);
    return ShiftEstimator(
        dim, [](const Vector& x) { return Vector(-x); }, [d](const Vector&) { return -d; }, "zero");
}

DensityPtr gaussian_prior_marginal(const std::vector<double>& weights, const std::vector<Vector>& means,
                                   const std::vector<double>& prior_variances)
{
    if (means.empty() || weights.size() != means.size() || prior_variances.size() != means.size())
        throw std::invalid_argument("gaussian_prior_marginal: weights, means and variances must match");
    std::vector<DensityPtr> comps;
    for (std::size_t j = 0; j < means.size(); ++j)
    {
        if (!(prior_variances[j] >= 0.0))
            throw std::invalid_argument("gaussian_prior_marginal: prior variance must be non-negative");
        comps.push_back(gaussian_iso(means[j], 1.0 + prior_variances[j]));
    }
    if (comps.size() == 1 && weights[0] == 1.0)
        return comps.front();
    return std::make_shared<const MixtureDensity>(weights, std::move(comps));
}

ShiftModel ShiftModel::from_gaussian(const Gaussian& truth)
{
    const auto d = static_cast<Eigen::Index>(truth.dim());
    if (truth.cov() != Matrix::Identity(d, d))
        throw std::invalid_argument(
            "shift model: only the identity covariance N(theta, I) is supported for SURE");
    return ShiftModel{truth.mean()};
}

std::shared_ptr<const Gaussian> ShiftModel::density() const { return gaussian_iso(theta, 1.0); }

double sure_estimate(const ShiftEstimator& estimator, const Vector& x)
{
    if (static_cast<std::size_t>(x.size()) != estimator.dim())
        throw std::invalid_argument(
            fmt::format("sure_estimate: x has dimension {}, estimator {}", x.size(), estimator.dim()));
    const Vector g = estimator.shift(x);
    return 2.0 * estimator.divergence(x) + g.squaredNorm() + static_cast<double>(estimator.dim());
}

double sure_log_form(const Density& f, const Vector& x)
{
    const LocalData local = f.local(x);
    if (!local.grad.allFinite() || !local.hess.allFinite())
        throw std::domain_error("sure_log_form: non-finite log-density derivatives");
    return 2.0 * local.hess.trace() + local.grad.squaredNorm() + static_cast<double>(f.dim());
}

ExpectationResult quadratic_risk_mc(const ShiftEstimator& estimator, const Vector& theta,
                                    const MonteCarloConfig& config)
{
    if (static_cast<std::size_t>(theta.size()) != estimator.dim())
        throw std::invalid_argument("quadratic_risk_mc: theta has the wrong dimension");
    const auto model = gaussian_iso(theta, 1.0);
    return expect_mc([&](const Vector& x) { return (estimator.estimate(x) - theta).squaredNorm(); }, *model,
                     config);
}

ExpectationResult quadratic_risk_mc(const ShiftEstimator& estimator, const Vector& theta, std::size_t n,
                                    std::uint64_t seed)
{
    MonteCarloConfig config;
    config.samples = n;
    config.seed = seed;
    return quadratic_risk_mc(estimator, theta, config);
}

UnbiasednessReport unbiasedness_experiment(const ShiftEstimator& estimator, const Vector& theta,
                                           const MonteCarloConfig& config, DensityPtr marginal,
                                           const EngineConfig& divergence_engine)
{
    if (static_cast<std::size_t>(theta.size()) != estimator.dim())
        throw std::invalid_argument("unbiasedness_experiment: theta has the wrong dimension");
    if (config.samples < 2)
        throw std::invalid_argument("unbiasedness_experiment: at least 2 samples are required");
    const auto model = gaussian_iso(theta, 1.0);

    std::vector<double> sure_values(config.samples);
    std::vector<double> risk_values(config.samples);
    std::vector<double> diffs;
    parallel_fill(
        config.samples, config.chunk_size, config.threads,
        [&](std::size_t i) {
            Rng rng = Rng::substream(config.seed, i);
            const Vector x = model->draw(rng);
            const double s = sure_estimate(estimator, x);
            const double r = (estimator.estimate(x) - theta).squaredNorm();
            sure_values[i] = s;
            risk_values[i] = r;
            return s - r;
        },
        diffs);

    UnbiasednessReport report;
    report.sure = mean_and_stderr(sure_values);
    report.risk = mean_and_stderr(risk_values);
    report.difference = mean_and_stderr(diffs);
    // When SURE and the loss coincide draw by draw the stderr is itself
    // round-off, so it gets the same floor as the quadrature error.
    double magnitude = 0.0;
    for (std::size_t i = 0; i < config.samples; ++i)
        magnitude += std::abs(sure_values[i]) + risk_values[i];
    report.difference_tolerance = 5.0 * report.difference.stderr_
                                  + 64.0 * std::numeric_limits<double>::epsilon() * magnitude
                                        / static_cast<double>(config.samples);
    report.success = std::abs(report.difference.mean) <= report.difference_tolerance;

    if (marginal)
    {
        const DivergenceResult dhs = hyvarinen_divergence(*marginal, *model, divergence_engine);
        report.divergence = ExpectationResult{dhs.value, dhs.error, dhs.engine, dhs.config};
        const double slack = report.divergence->tolerance();
        report.success = report.success
                         && std::abs(report.sure.mean - dhs.value) <= 5.0 * report.sure.stderr_ + slack
                         && std::abs(report.risk.mean - dhs.value) <= 5.0 * report.risk.stderr_ + slack;
    }
    return report;
}

}  // namespace scoring
