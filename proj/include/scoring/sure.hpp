#pragma once

// Stein unbiased risk estimation in the Gaussian shift model x ~ N(theta, I_d).
//
// For T(x) = x + g(x) the quadratic risk E_theta |T - theta|^2 is estimated
// without bias by
//
//   SURE(x) = 2 div g(x) + |g(x)|^2 + d.
//
// When T is a posterior mean, g = grad log f for the marginal density f,
// SURE equals the Hyvarinen score of f plus d, and the risk equals the
// Hyvarinen divergence of f from N(theta, I). Stein's identity needs g to be
// weakly differentiable with E|g|^2 and E|div g| finite; user-supplied g is
// assumed to satisfy this and unbiasedness is verified empirically.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scoring/densities.hpp"
#include "scoring/numerics.hpp"

namespace scoring {

class ShiftEstimator
{
  public:
    using Shift = std::function<Vector(const Vector&)>;
    using Divergence = std::function<double(const Vector&)>;

    /// Without an analytic divergence the central-difference trace of the
    /// Jacobian of g is used and approximate_divergence() reports true.
    ShiftEstimator(std::size_t dim, Shift g, std::optional<Divergence> div_g = std::nullopt,
                   std::string name = "custom");

    std::size_t dim() const { return dim_; }
    Vector shift(const Vector& x) const;
    double divergence(const Vector& x) const;
    Vector estimate(const Vector& x) const { return x + shift(x); }
    bool approximate_divergence() const { return !div_g_.has_value(); }
    const std::string& name() const { return name_; }

  private:
    std::size_t dim_;
    Shift g_;
    std::optional<Divergence> div_g_;
    std::string name_;
};

/// T = x + grad log f(x), div g = tr Hess log f(x).
ShiftEstimator posterior_mean_estimator(DensityPtr marginal);
/// T = x.
ShiftEstimator identity_estimator(std::size_t dim);
/// T = 0, i.e. g(x) = -x.
ShiftEstimator zero_estimator(std::size_t dim);

/// Marginal density of x ~ N(theta, I) under a prior theta ~ sum_j w_j N(m_j, tau2_j I).
DensityPtr gaussian_prior_marginal(const std::vector<double>& weights, const std::vector<Vector>& means,
                                   const std::vector<double>& prior_variances);

/// Observation model N(theta, I_d). Built from a Gaussian, any covariance
/// other than the identity is rejected.
struct ShiftModel
{
    Vector theta;

    static ShiftModel from_gaussian(const Gaussian& truth);
    std::size_t dim() const { return static_cast<std::size_t>(theta.size()); }
    std::shared_ptr<const Gaussian> density() const;
};

/// 2 div g(x) + |g(x)|^2 + d.
double sure_estimate(const ShiftEstimator& estimator, const Vector& x);

/// 2 tr Hess log f(x) + |grad log f(x)|^2 + d.
double sure_log_form(const Density& f, const Vector& x);

/// Mean and standard error of |T(x) - theta|^2 over x ~ N(theta, I).
ExpectationResult quadratic_risk_mc(const ShiftEstimator& estimator, const Vector& theta,
                                    const MonteCarloConfig& config);
ExpectationResult quadratic_risk_mc(const ShiftEstimator& estimator, const Vector& theta,
                                    std::size_t n, std::uint64_t seed);

struct UnbiasednessReport
{
    MeanAndError sure;
    MeanAndError risk;
    /// Per-draw SURE(x_i) - |T(x_i) - theta|^2.
    MeanAndError difference;
    /// 5 stderr of the difference plus a round-off floor.
    double difference_tolerance = 0.0;
    /// Hyvarinen divergence of the marginal from N(theta, I), when known.
    std::optional<ExpectationResult> divergence;
    bool success = false;
};

/// Paired Monte Carlo: every draw contributes both SURE and the loss.
/// Success iff |mean difference| <= difference_tolerance and, when a marginal is given,
/// both means lie within 5 stderr + the divergence's tolerance of it.
/// The divergence uses `divergence_engine` (quadrature needs d <= 2).
UnbiasednessReport unbiasedness_experiment(const ShiftEstimator& estimator, const Vector& theta,
                                           const MonteCarloConfig& config,
                                           DensityPtr marginal = nullptr,
                                           const EngineConfig& divergence_engine = QuadratureConfig{});

}  // namespace scoring
