#include "scoring/scores.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace scoring {
namespace {

std::string format_point(const Vector& x)
{
    std::string out = "(";
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out += fmt::format("{}{:.17g}", i ? "," : "", x[i]);
    return out + ")";
}

void require_finite_derivatives(const Vector& x, const LocalData& local, const char* op)
{
    if (!local.grad.allFinite() || !local.hess.allFinite())
        throw std::domain_error(
            fmt::format("{}: non-finite log-density derivatives at x = {}", op, format_point(x)));
}

double require_finite_result(const Vector& x, double v, const char* op)
{
    if (!std::isfinite(v))
        throw std::domain_error(fmt::format("{}: non-finite score at x = {}", op, format_point(x)));
    return v;
}

}  // namespace

double general_score(const Kernel& kernel, const Vector& x, const LocalData& local)
{
    require_finite_derivatives(x, local, "general_score");
    const Vector& sigma = local.grad;
    const double k = kernel.value(x, sigma);
    const Vector gk = kernel.grad_y(x, sigma);
    const Matrix hk = kernel.hess_y(x, sigma);
    const double trace_term = hk.cwiseProduct(local.hess).sum();
    return require_finite_result(x, k - sigma.dot(gk) - kernel.mixed_trace(x, sigma) - trace_term,
                                 "general_score");
}

double general_score(const Kernel& kernel, const Density& density, const Vector& x)
{
    return general_score(kernel, x, density.local(x));
}

double radial_score(const RadialProfile& profile, const Vector& x, const LocalData& local)
{
    require_finite_derivatives(x, local, "radial_score");
    const double laplacian = local.hess.trace();
    const double t = local.grad.norm();
    if (t <= kRadialEpsilon)
        return require_finite_result(x, -profile.curvature_at_zero() * laplacian, "radial_score");
    const Vector u = local.grad / t;
    const double tangential = profile.dpsi(t) / t;
    const double v = profile.psi(t) - tangential * (t * t + laplacian)
                     - (profile.d2psi(t) - tangential) * u.dot(local.hess * u);
    return require_finite_result(x, v, "radial_score");
}

double radial_score(const RadialProfile& profile, const Density& density, const Vector& x)
{
    return radial_score(profile, x, density.local(x));
}

double hyvarinen_score(const Vector& x, const LocalData& local)
{
    require_finite_derivatives(x, local, "hyvarinen_score");
    return require_finite_result(x, 2.0 * local.hess.trace() + local.grad.squaredNorm(),
                                 "hyvarinen_score");
}

double hyvarinen_score(const Density& density, const Vector& x)
{
    return hyvarinen_score(x, density.local(x));
}

double log_score(const Vector& x, const LocalData& local)
{
    return require_finite_result(x, -local.log_density, "log_score");
}

double log_score(const Density& density, const Vector& x)
{
    return require_finite_result(x, -density.log_density(x), "log_score");
}

//---------------------------------------------------------------------------//
// ScoringRule

ScoringRule ScoringRule::general(KernelPtr kernel)
{
    if (!kernel)
        throw std::invalid_argument("general scoring rule: null kernel");
    ScoringRule r;
    r.kind_ = Kind::GeneralKernel;
    r.concave_ = concavity_probe(*kernel, default_probe_grid(kernel->dim())).concave;
    r.kernel_ = std::move(kernel);
    return r;
}

ScoringRule ScoringRule::radial(RadialProfile profile)
{
    ScoringRule r;
    r.kind_ = Kind::Radial;
    r.concave_ = profile.concave_on_grid();
    r.profile_ = std::make_shared<const RadialProfile>(std::move(profile));
    return r;
}

ScoringRule ScoringRule::hyvarinen()
{
    ScoringRule r;
    r.kind_ = Kind::Hyvarinen;
    return r;
}

ScoringRule ScoringRule::logarithmic()
{
    ScoringRule r;
    r.kind_ = Kind::Logarithmic;
    return r;
}

ScoringRule ScoringRule::blend(double alpha, const ScoringRule& kernel_rule)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument(fmt::format("blend: alpha = {:g} outside [0, 1]", alpha));
    if (!kernel_rule.kernel_based())
        throw std::invalid_argument("blend: the inner rule must be kernel based");
    ScoringRule r;
    r.kind_ = Kind::Blend;
    r.alpha_ = alpha;
    r.concave_ = kernel_rule.concave_;
    r.inner_ = std::make_shared<const ScoringRule>(kernel_rule);
    return r;
}

std::string ScoringRule::name() const
{
    switch (kind_)
    {
    case Kind::GeneralKernel: return "general(" + kernel_->name() + ")";
    case Kind::Radial: return "radial(" + profile_->name() + ")";
    case Kind::Hyvarinen: return "hyvarinen";
    case Kind::Logarithmic: return "log";
    case Kind::Blend: return fmt::format("blend({:g},{})", alpha_, inner_->name());
    }
    return "unknown";
}

KernelPtr ScoringRule::kernel(std::size_t dim) const
{
    switch (kind_)
    {
    case Kind::GeneralKernel:
        if (kernel_->dim() != dim)
            throw std::invalid_argument(
                fmt::format("scoring rule: kernel dimension {} != {}", kernel_->dim(), dim));
        return kernel_;
    case Kind::Radial: return radial_kernel(*profile_, dim);
    case Kind::Hyvarinen: return radial_kernel(hyvarinen_profile(), dim);
    case Kind::Blend: return inner_->kernel(dim);
    case Kind::Logarithmic: break;
    }
    throw std::invalid_argument("scoring rule '" + name() + "' has no kernel");
}

double ScoringRule::evaluate(const Vector& x, const LocalData& local) const
{
    switch (kind_)
    {
    case Kind::GeneralKernel: return general_score(*kernel_, x, local);
    case Kind::Radial: return radial_score(*profile_, x, local);
    case Kind::Hyvarinen: return hyvarinen_score(x, local);
    case Kind::Logarithmic: return log_score(x, local);
    case Kind::Blend:
        if (alpha_ == 0.0)
            return inner_->evaluate(x, local);
        if (alpha_ == 1.0)
            return log_score(x, local);
        return (1.0 - alpha_) * inner_->evaluate(x, local) + alpha_ * log_score(x, local);
    }
    throw std::logic_error("unreachable scoring rule kind");
}

double ScoringRule::operator()(const Density& density, const Vector& x) const
{
    if (kind_ == Kind::Logarithmic)
        return log_score(density, x);
    return evaluate(x, density.local(x));
}

double blend_score(double alpha, const ScoringRule& kernel_rule, const Density& density,
                   const Vector& x)
{
    return ScoringRule::blend(alpha, kernel_rule)(density, x);
}

}  // namespace scoring
