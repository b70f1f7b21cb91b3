#include "scoring/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace scoring {
namespace {

constexpr double kConcavityTolerance = 1e-10;

double log_cosh(double t)
{
    t = std::abs(t);
    if (t <= 1.0)
    {
        const double s = std::sinh(0.5 * t);
        return std::log1p(2.0 * s * s);
    }
    return t + std::log1p(std::exp(-2.0 * t)) - std::numbers::ln2;
}

double sech2(double u)
{
    const double e = std::exp(-2.0 * std::abs(u));
    return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

}  // namespace

//---------------------------------------------------------------------------//
// RadialProfile

RadialProfile::RadialProfile(std::string name, Fn psi, Fn dpsi, Fn d2psi, GrowthBound growth)
    : name_(std::move(name)), psi_(std::move(psi)), dpsi_(std::move(dpsi)),
      d2psi_(std::move(d2psi)), growth_(growth)
{
    if (psi_(0.0) != 0.0 || dpsi_(0.0) != 0.0)
        throw std::invalid_argument(
            fmt::format("radial profile '{}': requires psi(0) = psi'(0) = 0", name_));
    curvature_at_zero_ = d2psi_(0.0);
    concave_ = true;
    for (int i = 0; i <= 1000; ++i)
    {
        const double t = 0.01 * i;
        if (d2psi_(t) > kConcavityTolerance)
            concave_ = false;
        const double radial = i == 0 ? curvature_at_zero_ : dpsi_(t) / t;
        if (radial > kConcavityTolerance)
            concave_ = false;
    }
}

RadialProfile hyvarinen_profile()
{
    return RadialProfile(
        "hyvarinen", [](double t) { return -t * t; }, [](double t) { return -2.0 * t; },
        [](double) { return -2.0; }, GrowthBound{2.0, 2.0});
}

RadialProfile logcosh_profile(double scale)
{
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument(fmt::format("logcosh profile: scale {:g} must be positive", scale));
    const std::string name = scale == 1.0 ? "logcosh" : fmt::format("logcosh(scale={:g})", scale);
    return RadialProfile(
        name, [scale](double t) { return -scale * scale * log_cosh(t / scale); },
        [scale](double t) { return -scale * std::tanh(t / scale); },
        [scale](double t) { return -sech2(t / scale); }, GrowthBound{std::max(scale, 2.0), 1.0});
}

RadialProfile convex_quadratic_profile()
{
    return RadialProfile(
        "convex-quadratic", [](double t) { return t * t; }, [](double t) { return 2.0 * t; },
        [](double) { return 2.0; }, GrowthBound{2.0, 2.0});
}

RadialProfile zero_profile()
{
    return RadialProfile(
        "zero", [](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
        GrowthBound{1.0, 1.0});
}

//---------------------------------------------------------------------------//
// RadialKernel

RadialKernel::RadialKernel(RadialProfile profile, std::size_t dim)
    : profile_(std::move(profile)), dim_(dim)
{
    if (dim_ == 0)
        throw std::invalid_argument("radial kernel: dimension must be positive");
}

double RadialKernel::value(const Vector&, const Vector& y) const { return profile_.psi(y.norm()); }

Vector RadialKernel::grad_y(const Vector&, const Vector& y) const
{
    const double t = y.norm();
    if (t <= kRadialEpsilon)
        return profile_.curvature_at_zero() * y;
    return (profile_.dpsi(t) / t) * y;
}

Matrix RadialKernel::hess_y(const Vector&, const Vector& y) const
{
    const auto d = y.size();
    const double t = y.norm();
    if (t <= kRadialEpsilon)
        return profile_.curvature_at_zero() * Matrix::Identity(d, d);
    const double tangential = profile_.dpsi(t) / t;
    const double radial = profile_.d2psi(t);
    const Vector u = y / t;
    Matrix h(d, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = j; i < d; ++i)
            h(i, j) = h(j, i) = (radial - tangential) * u[i] * u[j] + (i == j ? tangential : 0.0);
    return h;
}

KernelPtr radial_kernel(RadialProfile profile, std::size_t dim)
{
    return std::make_shared<const RadialKernel>(std::move(profile), dim);
}

//---------------------------------------------------------------------------//
// Functional and diagnostics

ExpectationResult phi_functional(const Kernel& kernel, const Density& density,
                                 const EngineConfig& engine)
{
    if (kernel.dim() != density.dim())
        throw std::invalid_argument(fmt::format("phi_functional: kernel dimension {} != density dimension {}",
                                                kernel.dim(), density.dim()));
    return expect([&](const Vector& x) { return kernel.value(x, density.grad_log_density(x)); },
                  density, engine);
}

ConcavityReport concavity_probe(const Kernel& kernel, const std::vector<Vector>& grid, const Vector& x)
{
    if (grid.empty())
        throw std::invalid_argument("concavity_probe: empty grid");
    ConcavityReport report;
    report.max_eigenvalue = -std::numeric_limits<double>::infinity();
    for (const auto& y : grid)
    {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(kernel.hess_y(x, y), Eigen::EigenvaluesOnly);
        const double top = eig.eigenvalues().maxCoeff();
        if (top > report.max_eigenvalue)
        {
            report.max_eigenvalue = top;
            report.argmax = y;
        }
    }
    report.concave = report.max_eigenvalue <= kConcavityTolerance;
    return report;
}

ConcavityReport concavity_probe(const Kernel& kernel, const std::vector<Vector>& grid)
{
    return concavity_probe(kernel, grid, Vector::Zero(static_cast<Eigen::Index>(kernel.dim())));
}

std::vector<Vector> default_probe_grid(std::size_t dim)
{
    const auto d = static_cast<Eigen::Index>(dim);
    static constexpr double kLevels[] = {-4.0, -1.0, -0.25, 0.0, 0.25, 1.0, 4.0};
    std::vector<Vector> grid;
    if (dim <= 3)
    {
        std::size_t total = 1;
        for (std::size_t k = 0; k < dim; ++k)
            total *= std::size(kLevels);
        for (std::size_t idx = 0; idx < total; ++idx)
        {
            Vector y(d);
            std::size_t rest = idx;
            for (Eigen::Index k = 0; k < d; ++k)
            {
                y[k] = kLevels[rest % std::size(kLevels)];
                rest /= std::size(kLevels);
            }
            grid.push_back(std::move(y));
        }
        return grid;
    }
    for (double level : kLevels)
    {
        grid.push_back(Vector::Constant(d, level));
        for (Eigen::Index k = 0; k < d; ++k)
        {
            Vector y = Vector::Zero(d);
            y[k] = level;
            grid.push_back(std::move(y));
        }
    }
    return grid;
}

PathConcavityReport phi_path_concavity(const Kernel& kernel, DensityPtr q, DensityPtr p,
                                       const std::vector<double>& t_grid, const EngineConfig& engine)
{
    if (t_grid.size() < 3)
        throw std::invalid_argument("phi_path_concavity: need at least 3 grid points");
    for (std::size_t i = 0; i < t_grid.size(); ++i)
    {
        if (!(t_grid[i] >= 0.0 && t_grid[i] <= 1.0))
            throw std::invalid_argument(fmt::format("phi_path_concavity: t = {:g} outside [0, 1]", t_grid[i]));
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("phi_path_concavity: grid must be strictly increasing");
    }

    PathConcavityReport report;
    report.t = t_grid;
    for (double t : t_grid)
    {
        const auto path = mixture_path(q, p, t);
        report.phi.push_back(phi_functional(kernel, *path, engine));
    }

    report.concave = true;
    for (std::size_t i = 1; i + 1 < t_grid.size(); ++i)
    {
        const double h_left = t_grid[i] - t_grid[i - 1];
        const double h_right = t_grid[i + 1] - t_grid[i];
        const double slope_left = (report.phi[i].value - report.phi[i - 1].value) / h_left;
        const double slope_right = (report.phi[i + 1].value - report.phi[i].value) / h_right;
        const double change = slope_right - slope_left;
        const double tol = report.phi[i + 1].tolerance() / h_right
                           + report.phi[i].tolerance() * (1.0 / h_left + 1.0 / h_right)
                           + report.phi[i - 1].tolerance() / h_left;
        report.second_differences.push_back(change);
        report.tolerances.push_back(tol);
        if (change > tol)
            report.concave = false;
    }
    return report;
}

}  // namespace scoring
