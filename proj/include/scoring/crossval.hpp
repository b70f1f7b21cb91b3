#pragma once

// Leave-one-out risk estimation for density estimates.
//
// With p_{-i} the estimate fitted without x_i, the average
//   R_hat = (1/n) sum_i S(p_{-i}, x_i)
// has expectation E_q S(p_{n-1}, .) for any local scoring rule, because x_i
// is independent of p_{-i}. The term S(q, q) is the same for every
// candidate and is dropped ("modified risk"), so risks can be compared
// across bandwidths without knowing q.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "scoring/densities.hpp"
#include "scoring/numerics.hpp"
#include "scoring/scores.hpp"

namespace scoring {

using LooFit = std::function<DensityPtr(std::size_t held_out)>;

/// Leave-one-out risk of the Gaussian KDE. Samples are put in lexicographic
/// order first, so the result depends only on the multiset of samples.
/// Throws std::invalid_argument for fewer than 2 samples.
double cross_validated_risk(const ScoringRule& rule, std::span<const Vector> samples, double bandwidth);

/// Same average for an arbitrary fit: loo_fit(i) must be the estimate built
/// from every sample except samples[i].
double cross_validated_risk(const ScoringRule& rule, std::span<const Vector> samples, const LooFit& loo_fit);

/// E_q S(p, .), i.e. the risk without the S(q, q) term.
ExpectationResult modified_risk(const ScoringRule& rule, const Density& p, const Density& q,
                                const EngineConfig& engine);

/// Average of modified_risk over the n leave-one-out KDE fits: the quantity
/// the leave-one-out risk estimates without bias. The error is the average
/// of the per-fit errors.
ExpectationResult loo_reference_risk(const ScoringRule& rule, std::span<const Vector> samples,
                                     double bandwidth, const Density& truth, const EngineConfig& engine);

struct CvReport
{
    std::vector<double> bandwidths;
    std::vector<double> cv_risk;
    /// Present when the true density was supplied.
    std::optional<std::vector<ExpectationResult>> reference;
    std::size_t selected_index = 0;
    double selected_bandwidth = 0.0;
};

/// Leave-one-out risk on each grid bandwidth; the argmin is selected, ties
/// going to the smaller bandwidth. The grid must be non-empty, positive and
/// strictly increasing.
CvReport select_bandwidth(const ScoringRule& rule, std::span<const Vector> samples,
                          const std::vector<double>& grid, const Density* truth = nullptr,
                          const EngineConfig& engine = QuadratureConfig{});

struct CvReplicationReport
{
    MeanAndError cv_risk;
    MeanAndError reference;
    /// Per-replication cv_risk - reference.
    MeanAndError difference;
    bool success = false;
};

/// Draws `replications` independent samples of size n from `truth`
/// (replication r uses seed Rng::substream(seed, r)()) and compares the
/// leave-one-out risk with loo_reference_risk on each. Success iff the mean
/// difference is within 5 standard errors of 0.
CvReplicationReport cv_replication_experiment(const ScoringRule& rule, const Density& truth, std::size_t n,
                                              double bandwidth, std::size_t replications, std::uint64_t seed,
                                              const EngineConfig& engine = QuadratureConfig{},
                                              std::size_t threads = 1);

/// One point per line, coordinates separated by commas. Blank lines and
/// lines starting with '#' are skipped; a first line that does not parse as
/// numbers is treated as a header. Throws std::runtime_error naming the line
/// on malformed input or inconsistent dimensions.
std::vector<Vector> read_samples(std::istream& in);

/// Header row "bandwidth,cv_risk[,reference_risk,reference_error],selected"
/// followed by one row per bandwidth, numbers with 17 significant digits.
void write_cv_report(std::ostream& out, const CvReport& report);

}  // namespace scoring
