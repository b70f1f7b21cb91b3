#pragma once

// Inner loop of isotropic Gaussian mixtures (kernel density estimates).
//
// For a query point x and components i with centers mu_i and log-weights
// lw_i, with common variance v, the kernel computes
//
//   logit_i = lw_i - |x - mu_i|^2 / (2 v),   M = max_i logit_i,
//   e_i     = exp(logit_i - M),
//   sum     = sum_i e_i,
//   first_k = sum_i e_i (x_k - mu_ik),
//   second_kl = sum_i e_i (x_k - mu_ik)(x_l - mu_il).
//
// Everything the mixture needs for log f, grad log f and its Hessian
// follows from these sums. Components with lw_i = -inf contribute nothing,
// which is how leave-one-out fits and lane padding are expressed.

#include <cstddef>
#include <span>
#include <string_view>

namespace scoring::simd {

inline constexpr std::size_t kMaxDim = 4;
inline constexpr std::size_t kLaneWidth = 4;

/// Structure-of-arrays view. centers[k * stride + i] is coordinate k of
/// component i; stride >= count and is a multiple of kLaneWidth. Entries in
/// [count, stride) must hold lw = -inf and finite centers.
struct IsoMixtureView
{
    std::size_t dim = 0;
    std::size_t count = 0;
    std::size_t stride = 0;
    const double* centers = nullptr;
    const double* log_weights = nullptr;
};

struct IsoMixtureSums
{
    double max_logit = 0.0;
    double sum = 0.0;
    double first[kMaxDim] = {};
    /// Row-major dim x dim, both triangles filled.
    double second[kMaxDim * kMaxDim] = {};
};

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b) noexcept;

/// True when the backend was compiled in and the CPU supports it.
bool backend_available(Backend b) noexcept;

/// Widest available backend; chosen once at startup.
Backend best_backend() noexcept;

Backend active_backend() noexcept;

/// Overrides the runtime choice (tests and benchmarks). Throws
/// std::invalid_argument if the backend is unavailable.
void set_backend(Backend b);

/// Reference implementation.
void iso_mixture_sums_scalar(const IsoMixtureView& view, std::span<const double> x,
                             double inv_var, IsoMixtureSums& out) noexcept;

/// AVX2/FMA implementation. Only call when backend_available(Backend::Avx2).
void iso_mixture_sums_avx2(const IsoMixtureView& view, std::span<const double> x,
                           double inv_var, IsoMixtureSums& out) noexcept;

/// Dispatches to the active backend.
void iso_mixture_sums(const IsoMixtureView& view, std::span<const double> x, double inv_var,
                      IsoMixtureSums& out) noexcept;

/// exp(x) for x <= 0 evaluated with the same polynomial as the AVX2 kernel,
/// lane by lane. Exposed for accuracy tests.
void exp_nonpositive_avx2(std::span<const double> in, std::span<double> out) noexcept;

}  // namespace scoring::simd
