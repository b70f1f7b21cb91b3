#include "scoring/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <mutex>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

namespace scoring {
namespace {

struct AxisRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

AxisRule composite_gauss_legendre(double lo, double hi, std::size_t panels)
{
    using Rule = boost::math::quadrature::gauss<double, QuadratureConfig::kPanelOrder>;
    const auto& abscissa = Rule::abscissa();
    const auto& weight = Rule::weights();

    // Boost stores the non-negative half of the symmetric rule.
    std::vector<double> ref_nodes;
    std::vector<double> ref_weights;
    for (std::size_t i = 0; i < abscissa.size(); ++i)
    {
        if (abscissa[i] == 0.0)
        {
            ref_nodes.push_back(0.0);
            ref_weights.push_back(weight[i]);
            continue;
        }
        ref_nodes.push_back(-abscissa[i]);
        ref_weights.push_back(weight[i]);
        ref_nodes.push_back(abscissa[i]);
        ref_weights.push_back(weight[i]);
    }

    AxisRule rule;
    const double width = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p)
    {
        const double center = lo + (static_cast<double>(p) + 0.5) * width;
        for (std::size_t i = 0; i < ref_nodes.size(); ++i)
        {
            rule.nodes.push_back(center + 0.5 * width * ref_nodes[i]);
            rule.weights.push_back(0.5 * width * ref_weights[i]);
        }
    }
    return rule;
}

struct QuadratureLevel
{
    double value = 0.0;
    double abs_sum = 0.0;
};

QuadratureLevel integrate_level(const PointFunction& fn, const Density& q, const Box& box,
                                std::size_t panels, std::size_t threads)
{
    const auto d = q.dim();
    std::vector<AxisRule> axes;
    for (std::size_t k = 0; k < d; ++k)
        axes.push_back(composite_gauss_legendre(box.lower[static_cast<Eigen::Index>(k)],
                                                box.upper[static_cast<Eigen::Index>(k)], panels));

    const std::size_t per_axis = axes[0].nodes.size();
    const std::size_t total = d == 1 ? per_axis : per_axis * per_axis;

    auto point_at = [&](std::size_t index, Vector& x, double& w) {
        if (d == 1)
        {
            x[0] = axes[0].nodes[index];
            w = axes[0].weights[index];
        }
        else
        {
            const std::size_t i = index / per_axis;
            const std::size_t j = index % per_axis;
            x[0] = axes[0].nodes[i];
            x[1] = axes[1].nodes[j];
            w = axes[0].weights[i] * axes[1].weights[j];
        }
    };

    std::vector<double> terms;
    parallel_fill(
        total, 4096, threads,
        [&](std::size_t index) {
            Vector x(static_cast<Eigen::Index>(d));
            double w = 0.0;
            point_at(index, x, w);
            const double f = fn(x);
            const double log_q = q.log_density(x);
            if (!std::isfinite(f) || std::isnan(log_q) || log_q == std::numeric_limits<double>::infinity())
            {
                std::string where;
                for (Eigen::Index k = 0; k < x.size(); ++k)
                    where += fmt::format("{}{:.6g}", k ? "," : "", x[k]);
                throw std::domain_error(fmt::format(
                    "expect_quadrature: non-finite integrand at x = ({}): fn = {}, log q = {}", where,
                    f, log_q));
            }
            return w * f * std::exp(log_q);
        },
        terms);

    QuadratureLevel level;
    level.value = compensated_sum(terms);
    for (double t : terms)
        level.abs_sum += std::abs(t);
    return level;
}

}  // namespace

double ExpectationResult::tolerance() const
{
    return engine == EngineKind::MonteCarlo ? 5.0 * error : error;
}

bool agree(const ExpectationResult& a, const ExpectationResult& b)
{
    return std::abs(a.value - b.value) <= a.tolerance() + b.tolerance();
}

bool agree(const ExpectationResult& a, double target)
{
    return std::abs(a.value - target) <= a.tolerance();
}

void parallel_fill(std::size_t count, std::size_t chunk_size, std::size_t threads,
                   const std::function<double(std::size_t)>& fn, std::vector<double>& out)
{
    out.assign(count, 0.0);
    chunk_size = std::max<std::size_t>(chunk_size, 1);
    const std::size_t chunks = (count + chunk_size - 1) / chunk_size;
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(chunks, 1));
    if (threads == 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;)
        {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks || failed.load())
                return;
            try
            {
                const std::size_t end = std::min(count, (c + 1) * chunk_size);
                for (std::size_t i = c * chunk_size; i < end; ++i)
                    out[i] = fn(i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

double compensated_sum(std::span<const double> values)
{
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values)
    {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

MeanAndError mean_and_stderr(std::span<const double> values)
{
    const auto n = static_cast<double>(values.size());
    MeanAndError out;
    if (values.empty())
        return out;
    out.mean = compensated_sum(values) / n;
    if (values.size() < 2)
        return out;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        const double c = values[i] - out.mean;
        sq[i] = c * c;
    }
    out.stderr_ = std::sqrt(compensated_sum(sq) / (n - 1.0) / n);
    return out;
}

ExpectationResult expect_quadrature(const PointFunction& fn, const Density& q,
                                    const QuadratureConfig& config)
{
    const std::size_t d = q.dim();
    if (d > 2)
        throw std::invalid_argument(fmt::format(
            "expect_quadrature: dimension {} > 2 is not supported; use the Monte Carlo engine", d));
    if (config.nodes_per_axis < QuadratureConfig::kPanelOrder)
        throw std::invalid_argument("expect_quadrature: nodes_per_axis must be at least 10");

    const Box box = config.bounds ? *config.bounds : q.support_box(config.box_sd);
    if (static_cast<std::size_t>(box.lower.size()) != d || static_cast<std::size_t>(box.upper.size()) != d)
        throw std::invalid_argument("expect_quadrature: bounds dimension mismatch");

    const std::size_t panels =
        (config.nodes_per_axis + QuadratureConfig::kPanelOrder - 1) / QuadratureConfig::kPanelOrder;
    const QuadratureLevel coarse = integrate_level(fn, q, box, panels, config.threads);
    const QuadratureLevel fine = integrate_level(fn, q, box, 2 * panels, config.threads);

    ExpectationResult out;
    out.value = fine.value;
    out.error = std::abs(fine.value - coarse.value)
                + 64.0 * std::numeric_limits<double>::epsilon() * fine.abs_sum;
    out.engine = EngineKind::Quadrature;
    out.config = describe(EngineConfig{config});
    return out;
}

ExpectationResult expect_mc(const PointFunction& fn, const Density& q, const MonteCarloConfig& config)
{
    if (!q.has_sampler())
        throw std::invalid_argument("expect_mc: density '" + q.describe()
                                    + "' has no exact sampler; use the quadrature engine");
    if (config.samples < 2)
        throw std::invalid_argument("expect_mc: at least 2 samples are required");

    std::vector<double> values;
    parallel_fill(
        config.samples, config.chunk_size, config.threads,
        [&](std::size_t i) {
            Rng rng = Rng::substream(config.seed, i);
            const Vector x = q.draw(rng);
            const double f = fn(x);
            if (!std::isfinite(f))
                throw std::domain_error(fmt::format("expect_mc: non-finite integrand at draw {}", i));
            return f;
        },
        values);

    const MeanAndError me = mean_and_stderr(values);
    ExpectationResult out;
    out.value = me.mean;
    out.error = me.stderr_;
    out.engine = EngineKind::MonteCarlo;
    out.config = describe(EngineConfig{config});
    return out;
}

ExpectationResult expect(const PointFunction& fn, const Density& q, const EngineConfig& engine)
{
    return std::visit(
        [&](const auto& cfg) -> ExpectationResult {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, QuadratureConfig>)
                return expect_quadrature(fn, q, cfg);
            else
                return expect_mc(fn, q, cfg);
        },
        engine);
}

std::string describe(const EngineConfig& engine)
{
    return std::visit(
        [](const auto& cfg) -> std::string {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, QuadratureConfig>)
                return cfg.bounds ? fmt::format("quadrature(nodes={},box=explicit)", cfg.nodes_per_axis)
                                  : fmt::format("quadrature(nodes={},box={:g}sd)", cfg.nodes_per_axis,
                                                cfg.box_sd);
            else
                return fmt::format("monte-carlo(n={},seed={})", cfg.samples, cfg.seed);
        },
        engine);
}

//---------------------------------------------------------------------------//
// Finite differences

namespace {

double step(const StepPolicy& policy, double xi) { return policy.base * (1.0 + std::abs(xi)); }

double checked(double v, const char* what)
{
    if (!std::isfinite(v))
        throw std::domain_error(fmt::format("{}: non-finite function value", what));
    return v;
}

}  // namespace

Vector fd_gradient(const PointFunction& fn, const Vector& x, StepPolicy policy)
{
    Vector g(x.size());
    Vector xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        const double h = step(policy, x[i]);
        xp[i] = x[i] + h;
        const double fp = checked(fn(xp), "fd_gradient");
        xp[i] = x[i] - h;
        const double fm = checked(fn(xp), "fd_gradient");
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Matrix fd_hessian(const PointFunction& fn, const Vector& x, StepPolicy policy)
{
    const auto d = x.size();
    Matrix h(d, d);
    Vector xp = x;
    const double f0 = checked(fn(x), "fd_hessian");
    for (Eigen::Index i = 0; i < d; ++i)
    {
        const double hi = step(policy, x[i]);
        xp[i] = x[i] + hi;
        const double fp = checked(fn(xp), "fd_hessian");
        xp[i] = x[i] - hi;
        const double fm = checked(fn(xp), "fd_hessian");
        xp[i] = x[i];
        h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (Eigen::Index j = 0; j < i; ++j)
        {
            const double hj = step(policy, x[j]);
            auto at = [&](double si, double sj) {
                xp[i] = x[i] + si * hi;
                xp[j] = x[j] + sj * hj;
                const double v = checked(fn(xp), "fd_hessian");
                xp[i] = x[i];
                xp[j] = x[j];
                return v;
            };
            h(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
            h(j, i) = h(i, j);
        }
    }
    return 0.5 * (h + h.transpose());
}

Matrix fd_jacobian(const VectorFunction& fn, const Vector& x, StepPolicy policy)
{
    Vector xp = x;
    Matrix jac;
    for (Eigen::Index j = 0; j < x.size(); ++j)
    {
        const double h = step(policy, x[j]);
        xp[j] = x[j] + h;
        const Vector fp = fn(xp);
        xp[j] = x[j] - h;
        const Vector fm = fn(xp);
        xp[j] = x[j];
        if (!fp.allFinite() || !fm.allFinite())
            throw std::domain_error("fd_jacobian: non-finite function value");
        if (jac.size() == 0)
            jac.resize(fp.size(), x.size());
        jac.col(j) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

}  // namespace scoring
