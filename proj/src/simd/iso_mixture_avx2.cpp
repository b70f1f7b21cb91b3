#include "scoring/simd/iso_mixture.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace scoring::simd {
namespace {

// exp(x) for x <= 0. Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2,
// degree-13 Taylor polynomial in r (truncation < 1 ulp), scaling by 2^n
// through the exponent field. Inputs below -708 flush to 0, which also
// covers -inf.
inline __m256d exp_nonpositive(__m256d x)
{
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d cutoff = _mm256_set1_pd(-708.0);

    const __m256d underflow = _mm256_cmp_pd(x, cutoff, _CMP_LT_OQ);
    x = _mm256_max_pd(x, cutoff);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    // 1/k! for k = 13 down to 0.
    static constexpr double c[] = {
        1.6059043836821613e-10, 2.0876756987868099e-09, 2.5052108385441720e-08,
        2.7557319223985893e-07, 2.7557319223985888e-06, 2.4801587301587302e-05,
        1.9841269841269841e-04, 1.3888888888888889e-03, 8.3333333333333332e-03,
        4.1666666666666664e-02, 1.6666666666666666e-01, 5.0000000000000000e-01,
        1.0, 1.0};
    __m256d p = _mm256_set1_pd(c[0]);
    for (int k = 1; k < 14; ++k)
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[k]));

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i bits = _mm256_cvtepi32_epi64(n32);
    bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
    bits = _mm256_slli_epi64(bits, 52);
    const __m256d scale = _mm256_castsi256_pd(bits);

    return _mm256_andnot_pd(underflow, _mm256_mul_pd(p, scale));
}

inline double hmax(__m256d v)
{
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    hi = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, hi));
}

inline double hsum(__m256d v)
{
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    hi = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, hi));
}

template <std::size_t D>
void sums_fixed(const IsoMixtureView& view, const double* x, double inv_var,
                IsoMixtureSums& out)
{
    const std::size_t stride = view.stride;
    const __m256d neg_half_inv_var = _mm256_set1_pd(-0.5 * inv_var);
    __m256d xq[D];
    for (std::size_t k = 0; k < D; ++k)
        xq[k] = _mm256_set1_pd(x[k]);

    __m256d vmax = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < stride; i += kLaneWidth)
    {
        __m256d r2 = _mm256_setzero_pd();
        for (std::size_t k = 0; k < D; ++k)
        {
            const __m256d diff = _mm256_sub_pd(xq[k], _mm256_loadu_pd(view.centers + k * stride + i));
            r2 = _mm256_fmadd_pd(diff, diff, r2);
        }
        const __m256d logit = _mm256_fmadd_pd(r2, neg_half_inv_var, _mm256_loadu_pd(view.log_weights + i));
        vmax = _mm256_max_pd(vmax, logit);
    }
    const double max_logit = hmax(vmax);
    const __m256d vm = _mm256_set1_pd(max_logit);

    __m256d acc_sum = _mm256_setzero_pd();
    __m256d acc_first[D];
    __m256d acc_second[D * (D + 1) / 2];
    for (auto& a : acc_first)
        a = _mm256_setzero_pd();
    for (auto& a : acc_second)
        a = _mm256_setzero_pd();

    for (std::size_t i = 0; i < stride; i += kLaneWidth)
    {
        __m256d diff[D];
        __m256d r2 = _mm256_setzero_pd();
        for (std::size_t k = 0; k < D; ++k)
        {
            diff[k] = _mm256_sub_pd(xq[k], _mm256_loadu_pd(view.centers + k * stride + i));
            r2 = _mm256_fmadd_pd(diff[k], diff[k], r2);
        }
        const __m256d logit = _mm256_fmadd_pd(r2, neg_half_inv_var, _mm256_loadu_pd(view.log_weights + i));
        const __m256d e = exp_nonpositive(_mm256_sub_pd(logit, vm));
        acc_sum = _mm256_add_pd(acc_sum, e);
        std::size_t t = 0;
        for (std::size_t k = 0; k < D; ++k)
        {
            const __m256d ed = _mm256_mul_pd(e, diff[k]);
            acc_first[k] = _mm256_add_pd(acc_first[k], ed);
            for (std::size_t l = 0; l <= k; ++l, ++t)
                acc_second[t] = _mm256_fmadd_pd(ed, diff[l], acc_second[t]);
        }
    }

    out = IsoMixtureSums{};
    out.max_logit = max_logit;
    out.sum = hsum(acc_sum);
    std::size_t t = 0;
    for (std::size_t k = 0; k < D; ++k)
    {
        out.first[k] = hsum(acc_first[k]);
        for (std::size_t l = 0; l <= k; ++l)
        {
            const double s = hsum(acc_second[t++]);
            out.second[k * D + l] = s;
            out.second[l * D + k] = s;
        }
    }
}

}  // namespace

void iso_mixture_sums_avx2(const IsoMixtureView& view, std::span<const double> x,
                           double inv_var, IsoMixtureSums& out) noexcept
{
    switch (view.dim)
    {
    case 1: sums_fixed<1>(view, x.data(), inv_var, out); return;
    case 2: sums_fixed<2>(view, x.data(), inv_var, out); return;
    case 3: sums_fixed<3>(view, x.data(), inv_var, out); return;
    case 4: sums_fixed<4>(view, x.data(), inv_var, out); return;
    default: iso_mixture_sums_scalar(view, x, inv_var, out); return;
    }
}

void exp_nonpositive_avx2(std::span<const double> in, std::span<double> out) noexcept
{
    double lane_in[kLaneWidth];
    double lane_out[kLaneWidth];
    for (std::size_t i = 0; i < in.size(); i += kLaneWidth)
    {
        const std::size_t m = std::min(kLaneWidth, in.size() - i);
        for (std::size_t j = 0; j < kLaneWidth; ++j)
            lane_in[j] = j < m ? in[i + j] : 0.0;
        _mm256_storeu_pd(lane_out, exp_nonpositive(_mm256_loadu_pd(lane_in)));
        for (std::size_t j = 0; j < m; ++j)
            out[i + j] = lane_out[j];
    }
}

}  // namespace scoring::simd
