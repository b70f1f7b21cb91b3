#pragma once

// Divergences d_S(p, q) = S(p, q) - S(q, q) induced by local proper scoring
// rules, where S(p, q) = E_q S(p, .). Everything integrates against q.
//
// For a kernel rule with k concave in y the divergence has a second
// representation that never touches second derivatives:
//
//   d_S(p, q) = E_q { k(x, s_p) - k(x, s_q) + <s_q - s_p, grad_y k(x, s_p)> },
//
// with s_p = grad log p, s_q = grad log q. The integrand is pointwise
// non-negative by the supporting-hyperplane inequality for concave k. The
// two routes agree because partial integration moves the divergence term of
// S(p, .) onto q / p; computing both is the main consistency check here.

#include <string>
#include <string_view>

#include "scoring/densities.hpp"
#include "scoring/kernels.hpp"
#include "scoring/numerics.hpp"
#include "scoring/scores.hpp"

namespace scoring {

enum class DivergenceMethod { ExpectedScore, Integrand, ClosedForm };

std::string_view method_name(DivergenceMethod m) noexcept;

struct DivergenceResult
{
    double value = 0.0;
    DivergenceMethod method = DivergenceMethod::ExpectedScore;
    double error = 0.0;
    EngineKind engine = EngineKind::Quadrature;
    std::string config;

    double tolerance() const { return engine == EngineKind::MonteCarlo ? 5.0 * error : error; }
};

/// |a - b| <= a.tolerance() + b.tolerance().
bool agree(const DivergenceResult& a, const DivergenceResult& b);

/// E_q S(p, .).
ExpectationResult expected_score(const ScoringRule& rule, const Density& p, const Density& q,
                                 const EngineConfig& engine);

/// S(p, q) - S(q, q). With quadrature the two expected scores are computed
/// separately and their errors added; with Monte Carlo the difference is
/// averaged over common draws and the error is its standard error.
DivergenceResult bregman_divergence(const ScoringRule& rule, const Density& p, const Density& q,
                                    const EngineConfig& engine);

/// k(x, s_p) - k(x, s_q) + <s_q - s_p, grad_y k(x, s_p)>.
double bregman_integrand(const Kernel& kernel, const Vector& x, const Vector& grad_log_p,
                         const Vector& grad_log_q);
double bregman_integrand(const Kernel& kernel, const Density& p, const Density& q, const Vector& x);

/// E_q of bregman_integrand.
DivergenceResult divergence_via_integrand(const Kernel& kernel, const Density& p, const Density& q,
                                          const EngineConfig& engine);

/// E_q |grad log p - grad log q|^2.
DivergenceResult hyvarinen_divergence(const Density& p, const Density& q, const EngineConfig& engine);

/// E_q[(1/q) div(q grad_y k(., grad log q))], which must vanish for the two
/// divergence routes to coincide. Returned so callers can test it against 0.
ExpectationResult divergence_term_mean(const Kernel& kernel, const Density& q,
                                       const EngineConfig& engine);

}  // namespace scoring
