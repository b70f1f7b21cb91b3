#include "scoring/simd/iso_mixture.hpp"

#include <cmath>
#include <limits>

namespace scoring::simd {

void iso_mixture_sums_scalar(const IsoMixtureView& view, std::span<const double> x,
                             double inv_var, IsoMixtureSums& out) noexcept
{
    const std::size_t d = view.dim;
    const std::size_t n = view.count;
    const double half_inv_var = 0.5 * inv_var;

    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
    {
        double r2 = 0.0;
        for (std::size_t k = 0; k < d; ++k)
        {
            const double diff = x[k] - view.centers[k * view.stride + i];
            r2 += diff * diff;
        }
        const double logit = view.log_weights[i] - half_inv_var * r2;
        if (logit > max_logit)
            max_logit = logit;
    }

    out = IsoMixtureSums{};
    out.max_logit = max_logit;
    double diff[kMaxDim];
    for (std::size_t i = 0; i < n; ++i)
    {
        if (view.log_weights[i] == -std::numeric_limits<double>::infinity())
            continue;
        double r2 = 0.0;
        for (std::size_t k = 0; k < d; ++k)
        {
            diff[k] = x[k] - view.centers[k * view.stride + i];
            r2 += diff[k] * diff[k];
        }
        const double e = std::exp(view.log_weights[i] - half_inv_var * r2 - max_logit);
        out.sum += e;
        for (std::size_t k = 0; k < d; ++k)
        {
            out.first[k] += e * diff[k];
            for (std::size_t l = 0; l <= k; ++l)
                out.second[k * d + l] += e * diff[k] * diff[l];
        }
    }
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < k; ++l)
            out.second[l * d + k] = out.second[k * d + l];
}

}  // namespace scoring::simd
