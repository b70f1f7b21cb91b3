#include "scoring/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "scoring/simd/iso_mixture.hpp"

namespace scoring {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string format_vector(const Vector& v)
{
    std::string out = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out += fmt::format("{}{:g}", i ? "," : "", v[i]);
    return out + "]";
}

// log cosh(t) without overflow or cancellation near 0.
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

}  // namespace

//---------------------------------------------------------------------------//
// Density

LocalData Density::local(const Vector& x) const
{
    return LocalData{log_density(x), grad_log_density(x), hess_log_density(x)};
}

Vector Density::draw(Rng&) const
{
    throw std::logic_error("density '" + describe()
                           + "' has no exact sampler; use the quadrature engine instead");
}

//---------------------------------------------------------------------------//
// Gaussian

Gaussian::Gaussian(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov))
{
    const auto d = mean_.size();
    if (d == 0)
        throw std::invalid_argument("gaussian: dimension must be positive");
    if (cov_.rows() != d || cov_.cols() != d)
        throw std::invalid_argument(
            fmt::format("gaussian: covariance is {}x{} but mean has dimension {}", cov_.rows(),
                        cov_.cols(), d));
    if (!cov_.allFinite())
        throw std::invalid_argument("gaussian: covariance has non-finite entries");
    const double asym = (cov_ - cov_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, cov_.cwiseAbs().maxCoeff()))
        throw std::invalid_argument(fmt::format("gaussian: covariance is not symmetric "
                                                "(max asymmetry {:g})",
                                                asym));
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_, Eigen::EigenvaluesOnly);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(min_eig > 0.0))
        throw std::invalid_argument(fmt::format(
            "gaussian: covariance is not positive definite (smallest eigenvalue {:.6g} <= 0)",
            min_eig));

    Eigen::LLT<Matrix> llt(cov_);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument(fmt::format(
            "gaussian: Cholesky factorisation failed (smallest eigenvalue {:.6g})", min_eig));
    chol_lower_ = llt.matrixL();
    precision_ = llt.solve(Matrix::Identity(d, d));
    precision_ = 0.5 * (precision_ + precision_.transpose()).eval();

    double log_det = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
        log_det += 2.0 * std::log(chol_lower_(i, i));
    log_norm_ = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
}

double Gaussian::log_density(const Vector& x) const
{
    const Vector diff = x - mean_;
    return log_norm_ - 0.5 * diff.dot(precision_ * diff);
}

Vector Gaussian::grad_log_density(const Vector& x) const { return -(precision_ * (x - mean_)); }

Matrix Gaussian::hess_log_density(const Vector&) const { return -precision_; }

LocalData Gaussian::local(const Vector& x) const
{
    const Vector diff = x - mean_;
    Vector grad = -(precision_ * diff);
    const double log_p = log_norm_ + 0.5 * diff.dot(grad);
    return LocalData{log_p, std::move(grad), -precision_};
}

Vector Gaussian::draw(Rng& rng) const
{
    std::normal_distribution<double> normal;
    Vector z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z[i] = normal(rng);
    return mean_ + chol_lower_ * z;
}

Box Gaussian::support_box(double sd_multiple) const
{
    const Vector half = sd_multiple * cov_.diagonal().cwiseSqrt();
    return Box{mean_ - half, mean_ + half};
}

std::string Gaussian::describe() const
{
    if (auto v = isotropic_variance())
        return fmt::format("N({},{:g}I)", format_vector(mean_), *v);
    std::ostringstream os;
    os << "N(" << format_vector(mean_) << ",cov)";
    return os.str();
}

std::optional<double> Gaussian::isotropic_variance() const
{
    const double v = cov_(0, 0);
    for (Eigen::Index i = 0; i < cov_.rows(); ++i)
        for (Eigen::Index j = 0; j < cov_.cols(); ++j)
            if (cov_(i, j) != (i == j ? v : 0.0))
                return std::nullopt;
    return v;
}

//---------------------------------------------------------------------------//
// LogisticProduct
//
// Per coordinate, with z = (x - mu) / s:
//   log p = -log s - 2 log(2 cosh(z/2)),
//   d/dx log p = -tanh(z/2) / s,
//   d2/dx2 log p = -sech^2(z/2) / (2 s^2).

LogisticProduct::LogisticProduct(Vector locations, Vector scales)
    : loc_(std::move(locations)), scale_(std::move(scales))
{
    if (loc_.size() == 0)
        throw std::invalid_argument("logistic: dimension must be positive");
    if (loc_.size() != scale_.size())
        throw std::invalid_argument("logistic: locations and scales differ in length");
    for (Eigen::Index i = 0; i < scale_.size(); ++i)
        if (!(scale_[i] > 0.0) || !std::isfinite(scale_[i]))
            throw std::invalid_argument(
                fmt::format("logistic: scale[{}] = {:g} must be positive", i, scale_[i]));
}

double LogisticProduct::log_density(const Vector& x) const
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < loc_.size(); ++i)
    {
        const double z = (x[i] - loc_[i]) / scale_[i];
        total += -std::log(scale_[i]) - 2.0 * (log_cosh(0.5 * z) + std::numbers::ln2);
    }
    return total;
}

Vector LogisticProduct::grad_log_density(const Vector& x) const
{
    Vector g(loc_.size());
    for (Eigen::Index i = 0; i < loc_.size(); ++i)
        g[i] = -std::tanh(0.5 * (x[i] - loc_[i]) / scale_[i]) / scale_[i];
    return g;
}

Matrix LogisticProduct::hess_log_density(const Vector& x) const
{
    Matrix h = Matrix::Zero(loc_.size(), loc_.size());
    for (Eigen::Index i = 0; i < loc_.size(); ++i)
    {
        const double u = std::abs(0.5 * (x[i] - loc_[i]) / scale_[i]);
        const double e = std::exp(-2.0 * u);
        const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        h(i, i) = -sech2 / (2.0 * scale_[i] * scale_[i]);
    }
    return h;
}

Vector LogisticProduct::draw(Rng& rng) const
{
    Vector out(loc_.size());
    for (Eigen::Index i = 0; i < loc_.size(); ++i)
    {
        const double u = rng.uniform_open();
        out[i] = loc_[i] + scale_[i] * (std::log(u) - std::log1p(-u));
    }
    return out;
}

Box LogisticProduct::support_box(double sd_multiple) const
{
    // Exponential tails: at least 40 scale units keeps the cut mass < 1e-17.
    const double sd_per_scale = std::numbers::pi / std::sqrt(3.0);
    const Vector half = scale_ * std::max(sd_multiple * sd_per_scale, 40.0);
    return Box{loc_ - half, loc_ + half};
}

std::string LogisticProduct::describe() const
{
    return fmt::format("Logistic({},{})", format_vector(loc_), format_vector(scale_));
}

//---------------------------------------------------------------------------//
// MixtureDensity

struct MixtureDensity::Pack
{
    std::size_t dim = 0;
    std::size_t count = 0;
    std::size_t stride = 0;
    std::vector<double> centers;
    double variance = 1.0;
    double log_norm = 0.0;
};

MixtureDensity::MixtureDensity(std::vector<double> weights, std::vector<DensityPtr> components,
                               Evaluation evaluation)
    : weights_(std::move(weights)), components_(std::move(components))
{
    validate();
    if (evaluation == Evaluation::General || dim_ > simd::kMaxDim)
        return;

    std::optional<double> common;
    for (const auto& c : components_)
    {
        const auto* g = dynamic_cast<const Gaussian*>(c.get());
        if (!g)
            return;
        const auto v = g->isotropic_variance();
        if (!v || (common && *common != *v))
            return;
        common = v;
    }

    auto pack = std::make_shared<Pack>();
    pack->dim = dim_;
    pack->count = components_.size();
    pack->stride = (pack->count + simd::kLaneWidth - 1) / simd::kLaneWidth * simd::kLaneWidth;
    pack->centers.assign(pack->dim * pack->stride, 0.0);
    for (std::size_t i = 0; i < pack->count; ++i)
    {
        const auto& mean = static_cast<const Gaussian&>(*components_[i]).mean();
        for (std::size_t k = 0; k < dim_; ++k)
            pack->centers[k * pack->stride + i] = mean[static_cast<Eigen::Index>(k)];
    }
    pack->variance = *common;
    pack->log_norm = -0.5 * static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi * *common);
    pack_ = std::move(pack);

    packed_log_weights_.assign(pack_->stride, kNegInf);
    for (std::size_t i = 0; i < weights_.size(); ++i)
        packed_log_weights_[i] = weights_[i] > 0.0 ? std::log(weights_[i]) : kNegInf;
}

MixtureDensity::MixtureDensity(std::vector<double> weights, std::vector<DensityPtr> components,
                               std::shared_ptr<const Pack> pack)
    : weights_(std::move(weights)), components_(std::move(components)), pack_(std::move(pack))
{
    validate();
    packed_log_weights_.assign(pack_->stride, kNegInf);
    for (std::size_t i = 0; i < weights_.size(); ++i)
        packed_log_weights_[i] = weights_[i] > 0.0 ? std::log(weights_[i]) : kNegInf;
}

void MixtureDensity::validate()
{
    if (components_.empty())
        throw std::invalid_argument("mixture: at least one component is required");
    if (weights_.size() != components_.size())
        throw std::invalid_argument(fmt::format("mixture: {} weights for {} components",
                                                weights_.size(), components_.size()));
    dim_ = components_.front()->dim();
    double total = 0.0;
    cumulative_.clear();
    for (std::size_t i = 0; i < weights_.size(); ++i)
    {
        if (!components_[i])
            throw std::invalid_argument("mixture: null component");
        if (components_[i]->dim() != dim_)
            throw std::invalid_argument(fmt::format(
                "mixture: component {} has dimension {}, expected {}", i, components_[i]->dim(), dim_));
        if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
            throw std::invalid_argument(
                fmt::format("mixture: weight[{}] = {:g} is not a probability", i, weights_[i]));
        total += weights_[i];
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument(
            fmt::format("mixture: weights sum to {:.17g}, which differs from 1 by more than 1e-12",
                        total));
}

LocalData MixtureDensity::local(const Vector& x) const
{
    return pack_ ? local_packed(x) : local_general(x);
}

double MixtureDensity::log_density(const Vector& x) const
{
    if (pack_)
        return local_packed(x).log_density;
    double max_logit = kNegInf;
    std::vector<double> logits(components_.size(), kNegInf);
    for (std::size_t i = 0; i < components_.size(); ++i)
    {
        if (weights_[i] == 0.0)
            continue;
        logits[i] = std::log(weights_[i]) + components_[i]->log_density(x);
        max_logit = std::max(max_logit, logits[i]);
    }
    double sum = 0.0;
    for (double l : logits)
        if (l != kNegInf)
            sum += std::exp(l - max_logit);
    return max_logit + std::log(sum);
}

Vector MixtureDensity::grad_log_density(const Vector& x) const { return local(x).grad; }

Matrix MixtureDensity::hess_log_density(const Vector& x) const { return local(x).hess; }

LocalData MixtureDensity::local_general(const Vector& x) const
{
    const std::size_t n = components_.size();
    std::vector<LocalData> parts(n);
    std::vector<double> logits(n, kNegInf);
    double max_logit = kNegInf;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (weights_[i] == 0.0)
            continue;
        parts[i] = components_[i]->local(x);
        logits[i] = std::log(weights_[i]) + parts[i].log_density;
        max_logit = std::max(max_logit, logits[i]);
    }

    double sum = 0.0;
    std::vector<double> resp(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (logits[i] != kNegInf)
        {
            resp[i] = std::exp(logits[i] - max_logit);
            sum += resp[i];
        }

    const auto d = static_cast<Eigen::Index>(dim_);
    LocalData out{max_logit + std::log(sum), Vector::Zero(d), Matrix::Zero(d, d)};
    for (std::size_t i = 0; i < n; ++i)
    {
        if (resp[i] == 0.0)
            continue;
        const double r = resp[i] / sum;
        out.grad += r * parts[i].grad;
        out.hess += r * (parts[i].hess + parts[i].grad * parts[i].grad.transpose());
    }
    out.hess -= out.grad * out.grad.transpose();
    out.hess = 0.5 * (out.hess + out.hess.transpose()).eval();
    return out;
}

LocalData MixtureDensity::local_packed(const Vector& x) const
{
    const simd::IsoMixtureView view{pack_->dim, pack_->count, pack_->stride, pack_->centers.data(),
                                    packed_log_weights_.data()};
    const double inv_var = 1.0 / pack_->variance;
    simd::IsoMixtureSums sums;
    simd::iso_mixture_sums(view, std::span<const double>(x.data(), dim_), inv_var, sums);

    const auto d = static_cast<Eigen::Index>(dim_);
    LocalData out{sums.max_logit + std::log(sums.sum) + pack_->log_norm, Vector(d), Matrix(d, d)};
    const double scale = inv_var / sums.sum;
    for (Eigen::Index k = 0; k < d; ++k)
        out.grad[k] = -scale * sums.first[k];
    for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l)
            out.hess(k, l) = inv_var * scale * sums.second[k * d + l] - out.grad[k] * out.grad[l]
                             - (k == l ? inv_var : 0.0);
    return out;
}

bool MixtureDensity::has_sampler() const
{
    return std::all_of(components_.begin(), components_.end(),
                       [](const DensityPtr& c) { return c->has_sampler(); });
}

Vector MixtureDensity::draw(Rng& rng) const
{
    if (!has_sampler())
        return Density::draw(rng);
    const double u = rng.uniform_open() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    auto index = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
    index = std::min(index, components_.size() - 1);
    while (weights_[index] == 0.0 && index > 0)
        --index;
    return components_[index]->draw(rng);
}

Box MixtureDensity::support_box(double sd_multiple) const
{
    const auto d = static_cast<Eigen::Index>(dim_);
    Vector lo_center = Vector::Constant(d, std::numeric_limits<double>::infinity());
    Vector hi_center = Vector::Constant(d, -std::numeric_limits<double>::infinity());
    Vector half = Vector::Zero(d);
    for (std::size_t i = 0; i < components_.size(); ++i)
    {
        if (weights_[i] == 0.0)
            continue;
        const Box b = components_[i]->support_box(sd_multiple);
        const Vector center = 0.5 * (b.lower + b.upper);
        lo_center = lo_center.cwiseMin(center);
        hi_center = hi_center.cwiseMax(center);
        half = half.cwiseMax(0.5 * (b.upper - b.lower));
    }
    return Box{lo_center - half, hi_center + half};
}

std::string MixtureDensity::describe() const
{
    if (components_.size() > 4)
        return fmt::format("Mixture[{} components]", components_.size());
    std::string out = "Mixture(";
    for (std::size_t i = 0; i < components_.size(); ++i)
        out += fmt::format("{}{:g}*{}", i ? "+" : "", weights_[i], components_[i]->describe());
    return out + ")";
}

MixtureDensity MixtureDensity::leave_one_out(std::size_t index) const
{
    const std::size_t n = components_.size();
    if (index >= n)
        throw std::out_of_range("mixture: leave-one-out index out of range");
    const double held = weights_[index];
    if (!(held < 1.0))
        throw std::invalid_argument("mixture: cannot leave out the only weighted component");
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = i == index ? 0.0 : weights_[i] / (1.0 - held);
    if (pack_)
        return MixtureDensity(std::move(w), components_, pack_);
    return MixtureDensity(std::move(w), components_, Evaluation::General);
}

//---------------------------------------------------------------------------//
// ScaledDensity

ScaledDensity::ScaledDensity(DensityPtr inner, double constant) : inner_(std::move(inner))
{
    if (!inner_)
        throw std::invalid_argument("scaled density: null inner density");
    if (!(constant > 0.0) || !std::isfinite(constant))
        throw std::invalid_argument(
            fmt::format("scaled density: constant {:g} must be positive", constant));
    log_constant_ = std::log(constant);
}

double ScaledDensity::log_density(const Vector& x) const
{
    return inner_->log_density(x) + log_constant_;
}

Vector ScaledDensity::grad_log_density(const Vector& x) const
{
    return inner_->grad_log_density(x);
}

Matrix ScaledDensity::hess_log_density(const Vector& x) const
{
    return inner_->hess_log_density(x);
}

LocalData ScaledDensity::local(const Vector& x) const
{
    LocalData out = inner_->local(x);
    out.log_density += log_constant_;
    return out;
}

std::string ScaledDensity::describe() const
{
    return fmt::format("{:g}*{}", std::exp(log_constant_), inner_->describe());
}

//---------------------------------------------------------------------------//
// Constructors

std::shared_ptr<const Gaussian> gaussian(Vector mean, Matrix cov)
{
    return std::make_shared<const Gaussian>(std::move(mean), std::move(cov));
}

std::shared_ptr<const Gaussian> gaussian_iso(Vector mean, double variance)
{
    const auto d = mean.size();
    return gaussian(std::move(mean), variance * Matrix::Identity(d, d));
}

std::shared_ptr<const MixtureDensity> gaussian_mixture(std::vector<double> weights,
                                                       std::vector<Vector> means,
                                                       std::vector<Matrix> covs)
{
    if (means.size() != covs.size())
        throw std::invalid_argument(fmt::format("gaussian_mixture: {} means but {} covariances",
                                                means.size(), covs.size()));
    std::vector<DensityPtr> comps;
    comps.reserve(means.size());
    for (std::size_t i = 0; i < means.size(); ++i)
        comps.push_back(gaussian(std::move(means[i]), std::move(covs[i])));
    return std::make_shared<const MixtureDensity>(std::move(weights), std::move(comps));
}

std::shared_ptr<const LogisticProduct> logistic_product(Vector locations, Vector scales)
{
    return std::make_shared<const LogisticProduct>(std::move(locations), std::move(scales));
}

std::shared_ptr<const MixtureDensity> kde(std::span<const Vector> points, double bandwidth)
{
    if (points.empty())
        throw std::invalid_argument("kde: empty point list");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw std::invalid_argument(fmt::format("kde: bandwidth {:g} must be positive", bandwidth));
    const double variance = bandwidth * bandwidth;
    std::vector<DensityPtr> comps;
    comps.reserve(points.size());
    for (const auto& p : points)
        comps.push_back(gaussian_iso(p, variance));
    std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
    // 1/n summed n times can miss 1 by a few ulps; fold the residual into the last weight.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        total += w[i];
    w.back() = 1.0 - total;
    return std::make_shared<const MixtureDensity>(std::move(w), std::move(comps));
}

std::shared_ptr<const MixtureDensity> mixture_path(DensityPtr q, DensityPtr p, double t)
{
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument(fmt::format("mixture_path: t = {:g} outside [0, 1]", t));
    if (!q || !p || q->dim() != p->dim())
        throw std::invalid_argument("mixture_path: densities must share a dimension");
    return std::make_shared<const MixtureDensity>(std::vector<double>{1.0 - t, t},
                                                  std::vector<DensityPtr>{std::move(q), std::move(p)});
}

std::vector<Vector> sample(const Density& density, std::size_t count, std::uint64_t seed)
{
    if (!density.has_sampler())
        throw std::invalid_argument("sample: density '" + density.describe()
                                    + "' has no exact sampler; use quadrature instead");
    std::vector<Vector> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        Rng rng = Rng::substream(seed, i);
        out.push_back(density.draw(rng));
    }
    return out;
}

}  // namespace scoring
