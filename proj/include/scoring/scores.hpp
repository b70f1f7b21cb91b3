#pragma once

// Local scoring rules of order two. A rule sees the forecast density p only
// through LocalData at the observation x: log p(x), sigma = grad log p(x)
// and H = Hessian of log p(x). The kernel-based rules use only sigma and H,
// so they are unchanged when p is multiplied by a constant.

#include <memory>
#include <string>

#include "scoring/densities.hpp"
#include "scoring/kernels.hpp"
#include "scoring/linalg.hpp"

namespace scoring {

/// S(p, x) = k(x, sigma) - <sigma, grad_y k(x, sigma)> - mixed_trace(x, sigma)
///           - tr(hess_y k(x, sigma) H).
///
/// This is k(x, sigma) - (1/p) div[p grad_y k(x, sigma(x))] with the
/// divergence expanded by the product rule.
double general_score(const Kernel& kernel, const Vector& x, const LocalData& local);
double general_score(const Kernel& kernel, const Density& density, const Vector& x);

/// Closed form for k(y) = psi(|y|), t = |sigma|, u = sigma / t:
///   psi(t) - (psi'(t)/t)(t^2 + tr H) - (psi''(t) - psi'(t)/t) <u, H u>.
/// For t <= kRadialEpsilon the limit -psi''(0) tr H is returned.
double radial_score(const RadialProfile& profile, const Vector& x, const LocalData& local);
double radial_score(const RadialProfile& profile, const Density& density, const Vector& x);

/// 2 tr H + |sigma|^2.
double hyvarinen_score(const Vector& x, const LocalData& local);
double hyvarinen_score(const Density& density, const Vector& x);

/// -log p(x).
double log_score(const Vector& x, const LocalData& local);
double log_score(const Density& density, const Vector& x);

class ScoringRule
{
  public:
    enum class Kind { GeneralKernel, Radial, Hyvarinen, Logarithmic, Blend };

    static ScoringRule general(KernelPtr kernel);
    static ScoringRule radial(RadialProfile profile);
    static ScoringRule hyvarinen();
    static ScoringRule logarithmic();
    /// (1 - alpha) * kernel_rule + alpha * log score. Throws
    /// std::invalid_argument for alpha outside [0, 1] or a non-kernel inner rule.
    static ScoringRule blend(double alpha, const ScoringRule& kernel_rule);

    Kind kind() const { return kind_; }
    std::string name() const;
    bool kernel_based() const { return kind_ != Kind::Logarithmic && kind_ != Kind::Blend; }
    bool uses_log_density() const { return kind_ == Kind::Logarithmic || kind_ == Kind::Blend; }
    double alpha() const { return alpha_; }

    /// False when the generating kernel failed the concavity probe; the
    /// rule is still evaluated but is not known to be proper.
    bool propriety_guaranteed() const { return concave_; }

    /// Kernel behind a kernel-based rule (or the kernel part of a blend).
    KernelPtr kernel(std::size_t dim) const;

    /// Throws std::domain_error naming x if the local data or the result is
    /// non-finite.
    double evaluate(const Vector& x, const LocalData& local) const;
    double operator()(const Density& density, const Vector& x) const;

  private:
    ScoringRule() = default;

    Kind kind_ = Kind::Hyvarinen;
    KernelPtr kernel_;
    std::shared_ptr<const RadialProfile> profile_;
    std::shared_ptr<const ScoringRule> inner_;
    double alpha_ = 0.0;
    bool concave_ = true;
};

/// (1 - alpha) S_kernel(p, x) - alpha log p(x).
double blend_score(double alpha, const ScoringRule& kernel_rule, const Density& density,
                   const Vector& x);

}  // namespace scoring
