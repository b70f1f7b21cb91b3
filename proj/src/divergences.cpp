#include "scoring/divergences.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace scoring {
namespace {

void require_same_dim(const Density& p, const Density& q, const char* op)
{
    if (p.dim() != q.dim())
        throw std::invalid_argument(fmt::format("{}: densities have dimensions {} and {}", op, p.dim(), q.dim()));
}

DivergenceResult from_expectation(const ExpectationResult& e, DivergenceMethod method)
{
    return DivergenceResult{e.value, method, e.error, e.engine, e.config};
}

}  // namespace

std::string_view method_name(DivergenceMethod m) noexcept
{
    switch (m)
    {
    case DivergenceMethod::ExpectedScore: return "expected-score";
    case DivergenceMethod::Integrand: return "integrand";
    case DivergenceMethod::ClosedForm: return "closed-form";
    }
    return "unknown";
}

bool agree(const DivergenceResult& a, const DivergenceResult& b)
{
    return std::abs(a.value - b.value) <= a.tolerance() + b.tolerance();
}

ExpectationResult expected_score(const ScoringRule& rule, const Density& p, const Density& q,
                                 const EngineConfig& engine)
{
    require_same_dim(p, q, "expected_score");
    return expect([&](const Vector& x) { return rule(p, x); }, q, engine);
}

DivergenceResult bregman_divergence(const ScoringRule& rule, const Density& p, const Density& q,
                                    const EngineConfig& engine)
{
    require_same_dim(p, q, "bregman_divergence");
    if (std::holds_alternative<MonteCarloConfig>(engine))
    {
        const auto diff = expect([&](const Vector& x) { return rule(p, x) - rule(q, x); }, q, engine);
        return from_expectation(diff, DivergenceMethod::ExpectedScore);
    }
    const ExpectationResult sp = expected_score(rule, p, q, engine);
    const ExpectationResult sq = expected_score(rule, q, q, engine);
    return DivergenceResult{sp.value - sq.value, DivergenceMethod::ExpectedScore, sp.error + sq.error,
                            sp.engine, sp.config};
}

double bregman_integrand(const Kernel& kernel, const Vector& x, const Vector& grad_log_p,
                         const Vector& grad_log_q)
{
    if (!grad_log_p.allFinite() || !grad_log_q.allFinite())
        throw std::domain_error("bregman_integrand: non-finite log-density gradient");
    return kernel.value(x, grad_log_p) - kernel.value(x, grad_log_q)
           + (grad_log_q - grad_log_p).dot(kernel.grad_y(x, grad_log_p));
}

double bregman_integrand(const Kernel& kernel, const Density& p, const Density& q, const Vector& x)
{
    return bregman_integrand(kernel, x, p.grad_log_density(x), q.grad_log_density(x));
}

DivergenceResult divergence_via_integrand(const Kernel& kernel, const Density& p, const Density& q,
                                          const EngineConfig& engine)
{
    require_same_dim(p, q, "divergence_via_integrand");
    const auto e = expect([&](const Vector& x) { return bregman_integrand(kernel, p, q, x); }, q, engine);
    return from_expectation(e, DivergenceMethod::Integrand);
}

DivergenceResult hyvarinen_divergence(const Density& p, const Density& q, const EngineConfig& engine)
{
    require_same_dim(p, q, "hyvarinen_divergence");
    const auto e = expect(
        [&](const Vector& x) { return (p.grad_log_density(x) - q.grad_log_density(x)).squaredNorm(); },
        q, engine);
    return from_expectation(e, DivergenceMethod::ClosedForm);
}

ExpectationResult divergence_term_mean(const Kernel& kernel, const Density& q, const EngineConfig& engine)
{
    return expect(
        [&](const Vector& x) {
            const LocalData local = q.local(x);
            const Vector& sigma = local.grad;
            return sigma.dot(kernel.grad_y(x, sigma)) + kernel.mixed_trace(x, sigma)
                   + kernel.hess_y(x, sigma).cwiseProduct(local.hess).sum();
        },
        q, engine);
}

}  // namespace scoring
