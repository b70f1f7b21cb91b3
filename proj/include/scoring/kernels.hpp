#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "scoring/densities.hpp"
#include "scoring/linalg.hpp"
#include "scoring/numerics.hpp"

namespace scoring {

/// Constants (C, r) with |k*(x, y)| <= C (1 + |x| + |y|)^r for k and every
/// partial derivative up to order two.
struct GrowthBound
{
    double constant = 1.0;
    double exponent = 1.0;
};

/// Scalar profile psi on [0, inf) with psi(0) = psi'(0) = 0, generating the
/// radial kernel k(y) = psi(|y|).
class RadialProfile
{
  public:
    using Fn = std::function<double(double)>;

    RadialProfile(std::string name, Fn psi, Fn dpsi, Fn d2psi, GrowthBound growth);

    double psi(double t) const { return psi_(t); }
    double dpsi(double t) const { return dpsi_(t); }
    double d2psi(double t) const { return d2psi_(t); }
    double curvature_at_zero() const { return curvature_at_zero_; }
    const std::string& name() const { return name_; }
    const GrowthBound& growth() const { return growth_; }

    /// psi'' <= 1e-10 and psi'(t)/t <= 1e-10 on t in {0, 0.01, ..., 10}.
    /// These are the two eigenvalues of the radial Hessian, so this is
    /// concavity of y -> psi(|y|) on the grid.
    bool concave_on_grid() const { return concave_; }

  private:
    std::string name_;
    Fn psi_;
    Fn dpsi_;
    Fn d2psi_;
    GrowthBound growth_;
    double curvature_at_zero_ = 0.0;
    bool concave_ = false;
};

/// psi(t) = -t^2. Yields the Hyvarinen score.
RadialProfile hyvarinen_profile();
/// psi(t) = -s^2 log cosh(t / s); s = 1 is the plain -log cosh t.
RadialProfile logcosh_profile(double scale = 1.0);
/// psi(t) = +t^2. Convex; only useful as a counterexample.
RadialProfile convex_quadratic_profile();
/// psi = 0.
RadialProfile zero_profile();

/// Kernel k(x, y) on R^d x R^d with the derivative data the scoring rule
/// needs: gradient and Hessian in y and the mixed trace
/// sum_i d^2 k / (dx_i dy_i).
class Kernel
{
  public:
    virtual ~Kernel() = default;

    virtual std::size_t dim() const = 0;
    virtual double value(const Vector& x, const Vector& y) const = 0;
    virtual Vector grad_y(const Vector& x, const Vector& y) const = 0;
    virtual Matrix hess_y(const Vector& x, const Vector& y) const = 0;
    virtual double mixed_trace(const Vector& x, const Vector& y) const = 0;
    virtual GrowthBound growth() const = 0;
    virtual std::string name() const = 0;
};

using KernelPtr = std::shared_ptr<const Kernel>;

/// Below this |y| the radial kernel switches to its limits at the origin.
inline constexpr double kRadialEpsilon = 1e-6;

/// k(x, y) = psi(|y|), independent of x.
///   grad_y k = psi'(|y|) y / |y|
///   hess_y k = (psi'/|y|) I + (psi'' - psi'/|y|) y y^T / |y|^2
/// For |y| <= kRadialEpsilon: grad_y k = psi''(0) y, hess_y k = psi''(0) I.
class RadialKernel final : public Kernel
{
  public:
    RadialKernel(RadialProfile profile, std::size_t dim);

    std::size_t dim() const override { return dim_; }
    double value(const Vector& x, const Vector& y) const override;
    Vector grad_y(const Vector& x, const Vector& y) const override;
    Matrix hess_y(const Vector& x, const Vector& y) const override;
    double mixed_trace(const Vector&, const Vector&) const override { return 0.0; }
    GrowthBound growth() const override { return profile_.growth(); }
    std::string name() const override { return profile_.name(); }

    const RadialProfile& profile() const { return profile_; }

  private:
    RadialProfile profile_;
    std::size_t dim_;
};

KernelPtr radial_kernel(RadialProfile profile, std::size_t dim);

/// Phi(p) = E_p k(x, grad log p(x)).
ExpectationResult phi_functional(const Kernel& kernel, const Density& density,
                                 const EngineConfig& engine);

struct ConcavityReport
{
    double max_eigenvalue = 0.0;
    Vector argmax;
    bool concave = false;
};

/// Largest eigenvalue of hess_y k(x, y) over the grid (at the given x);
/// concave iff it is <= 1e-10.
ConcavityReport concavity_probe(const Kernel& kernel, const std::vector<Vector>& grid,
                                const Vector& x);
ConcavityReport concavity_probe(const Kernel& kernel, const std::vector<Vector>& grid);

/// Cube {-r, ..., r}^d with r in {0, 0.25, 1, 4} per axis (d <= 3) or the
/// axes and diagonals (d > 3).
std::vector<Vector> default_probe_grid(std::size_t dim);

struct PathConcavityReport
{
    std::vector<double> t;
    std::vector<ExpectationResult> phi;
    /// Slope changes (phi_{i+1} - phi_i)/(t_{i+1} - t_i) - (phi_i - phi_{i-1})/(t_i - t_{i-1}).
    std::vector<double> second_differences;
    /// Error propagated from the engine's bounds into each slope change.
    std::vector<double> tolerances;
    bool concave = false;
};

/// Evaluates t -> Phi((1 - t) q + t p) on a sorted grid of >= 3 points in
/// [0, 1] and flags concavity iff every slope change is <= its tolerance.
PathConcavityReport phi_path_concavity(const Kernel& kernel, DensityPtr q, DensityPtr p,
                                       const std::vector<double>& t_grid,
                                       const EngineConfig& engine);

}  // namespace scoring
