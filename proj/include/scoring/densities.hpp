#pragma once

// Smooth, strictly positive densities on R^d with exact log-density
// derivatives.
//
// The built-in families (Gaussian, logistic product, finite mixtures of
// these, Gaussian KDEs) are C^2, positive everywhere and have tails for
// which p and its first two derivatives decay faster than any polynomial
// while |log p|, (d_i p / p)^2 and |d_ij p| / p grow at most polynomially.
// That is the regularity the scoring-rule identities in this library rely
// on. A user-defined Density is taken to satisfy the same contract; the
// tail conditions cannot be verified pointwise, so they are not checked.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "scoring/linalg.hpp"
#include "scoring/rng.hpp"

namespace scoring {

class Density
{
  public:
    virtual ~Density() = default;

    virtual std::size_t dim() const = 0;
    virtual double log_density(const Vector& x) const = 0;
    virtual Vector grad_log_density(const Vector& x) const = 0;
    virtual Matrix hess_log_density(const Vector& x) const = 0;

    /// All three at once. Families override this when the pieces share work.
    virtual LocalData local(const Vector& x) const;

    virtual bool has_sampler() const { return false; }

    /// One draw. The default throws std::logic_error: only families with
    /// exact samplers support Monte Carlo.
    virtual Vector draw(Rng& rng) const;

    /// Integration box holding all but a negligible amount of mass.
    /// `sd_multiple` is the half width in standard deviations for
    /// Gaussian-tailed families.
    virtual Box support_box(double sd_multiple) const = 0;

    virtual std::string describe() const = 0;
};

using DensityPtr = std::shared_ptr<const Density>;

class Gaussian final : public Density
{
  public:
    /// Throws std::invalid_argument unless cov is symmetric positive definite.
    Gaussian(Vector mean, Matrix cov);

    std::size_t dim() const override { return static_cast<std::size_t>(mean_.size()); }
    double log_density(const Vector& x) const override;
    Vector grad_log_density(const Vector& x) const override;
    Matrix hess_log_density(const Vector& x) const override;
    LocalData local(const Vector& x) const override;
    bool has_sampler() const override { return true; }
    Vector draw(Rng& rng) const override;
    Box support_box(double sd_multiple) const override;
    std::string describe() const override;

    const Vector& mean() const { return mean_; }
    const Matrix& cov() const { return cov_; }
    /// v when cov == v * I exactly.
    std::optional<double> isotropic_variance() const;

  private:
    Vector mean_;
    Matrix cov_;
    Matrix precision_;
    Matrix chol_lower_;
    double log_norm_ = 0.0;
};

/// Product of independent one-dimensional logistic densities.
class LogisticProduct final : public Density
{
  public:
    LogisticProduct(Vector locations, Vector scales);

    std::size_t dim() const override { return static_cast<std::size_t>(loc_.size()); }
    double log_density(const Vector& x) const override;
    Vector grad_log_density(const Vector& x) const override;
    Matrix hess_log_density(const Vector& x) const override;
    bool has_sampler() const override { return true; }
    Vector draw(Rng& rng) const override;
    Box support_box(double sd_multiple) const override;
    std::string describe() const override;

  private:
    Vector loc_;
    Vector scale_;
};

/// Finite mixture sum_i w_i p_i with log-sum-exp evaluation.
///
/// grad log f = sum_i r_i s_i and
/// Hess log f = sum_i r_i (H_i + s_i s_i^T) - m m^T, m = sum_i r_i s_i,
/// with responsibilities r_i = w_i p_i / f. Zero weights are allowed.
///
/// When every component is a Gaussian with the same covariance v * I the
/// mixture switches to a packed representation evaluated by the SIMD kernels.
class MixtureDensity final : public Density
{
  public:
    enum class Evaluation { Auto, General };

    /// Throws std::invalid_argument on empty input, dimension mismatch,
    /// negative weights, or a weight sum differing from 1 by more than 1e-12.
    MixtureDensity(std::vector<double> weights, std::vector<DensityPtr> components,
                   Evaluation evaluation = Evaluation::Auto);

    std::size_t dim() const override { return dim_; }
    double log_density(const Vector& x) const override;
    Vector grad_log_density(const Vector& x) const override;
    Matrix hess_log_density(const Vector& x) const override;
    LocalData local(const Vector& x) const override;
    bool has_sampler() const override;
    Vector draw(Rng& rng) const override;
    Box support_box(double sd_multiple) const override;
    std::string describe() const override;

    std::span<const double> weights() const { return weights_; }
    const std::vector<DensityPtr>& components() const { return components_; }
    bool packed() const { return pack_ != nullptr; }

    /// Same components, weight 0 on `index` and the others renormalised
    /// to sum to one. Shares the packed centers with this mixture.
    MixtureDensity leave_one_out(std::size_t index) const;

  private:
    struct Pack;

    MixtureDensity(std::vector<double> weights, std::vector<DensityPtr> components,
                   std::shared_ptr<const Pack> pack);
    LocalData local_general(const Vector& x) const;
    LocalData local_packed(const Vector& x) const;
    void validate();

    std::size_t dim_ = 0;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    std::vector<DensityPtr> components_;
    std::shared_ptr<const Pack> pack_;
    std::vector<double> packed_log_weights_;
};

/// c * p for a constant c > 0: log density shifted by log c, derivatives
/// untouched. Models an unnormalised forecast.
class ScaledDensity final : public Density
{
  public:
    ScaledDensity(DensityPtr inner, double constant);

    std::size_t dim() const override { return inner_->dim(); }
    double log_density(const Vector& x) const override;
    Vector grad_log_density(const Vector& x) const override;
    Matrix hess_log_density(const Vector& x) const override;
    LocalData local(const Vector& x) const override;
    bool has_sampler() const override { return inner_->has_sampler(); }
    Vector draw(Rng& rng) const override { return inner_->draw(rng); }
    Box support_box(double sd_multiple) const override { return inner_->support_box(sd_multiple); }
    std::string describe() const override;

  private:
    DensityPtr inner_;
    double log_constant_;
};

std::shared_ptr<const Gaussian> gaussian(Vector mean, Matrix cov);
/// N(mean, variance * I).
std::shared_ptr<const Gaussian> gaussian_iso(Vector mean, double variance);
std::shared_ptr<const MixtureDensity> gaussian_mixture(std::vector<double> weights,
                                                       std::vector<Vector> means,
                                                       std::vector<Matrix> covs);
std::shared_ptr<const LogisticProduct> logistic_product(Vector locations, Vector scales);
/// Equal-weight mixture of N(point, bandwidth^2 I).
std::shared_ptr<const MixtureDensity> kde(std::span<const Vector> points, double bandwidth);
/// (1 - t) q + t p, t in [0, 1].
std::shared_ptr<const MixtureDensity> mixture_path(DensityPtr q, DensityPtr p, double t);

/// `count` draws; draw i comes from Rng::substream(seed, i).
std::vector<Vector> sample(const Density& density, std::size_t count, std::uint64_t seed);

}  // namespace scoring
