#include "scoring/simd/iso_mixture.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

namespace scoring::simd {
namespace {

bool cpu_has_avx2() noexcept
{
#if defined(SCORING_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<Backend>& active()
{
    static std::atomic<Backend> backend{best_backend()};
    return backend;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept
{
    switch (b)
    {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

bool backend_available(Backend b) noexcept
{
    return b == Backend::Scalar || (b == Backend::Avx2 && cpu_has_avx2());
}

Backend best_backend() noexcept
{
    return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

Backend active_backend() noexcept { return active().load(std::memory_order_relaxed); }

void set_backend(Backend b)
{
    if (!backend_available(b))
        throw std::invalid_argument("SIMD backend '" + std::string(backend_name(b))
                                    + "' is not available on this machine");
    active().store(b, std::memory_order_relaxed);
}

void iso_mixture_sums(const IsoMixtureView& view, std::span<const double> x, double inv_var,
                      IsoMixtureSums& out) noexcept
{
#if defined(SCORING_HAVE_AVX2_TU)
    if (active_backend() == Backend::Avx2)
    {
        iso_mixture_sums_avx2(view, x, inv_var, out);
        return;
    }
#endif
    iso_mixture_sums_scalar(view, x, inv_var, out);
}

#if !defined(SCORING_HAVE_AVX2_TU)
void iso_mixture_sums_avx2(const IsoMixtureView& view, std::span<const double> x,
                           double inv_var, IsoMixtureSums& out) noexcept
{
    iso_mixture_sums_scalar(view, x, inv_var, out);
}

void exp_nonpositive_avx2(std::span<const double> in, std::span<double> out) noexcept
{
    for (std::size_t i = 0; i < in.size(); ++i)
        out[i] = std::exp(in[i]);
}
#endif

}  // namespace scoring::simd
