#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "scoring/densities.hpp"
#include "scoring/linalg.hpp"

namespace scoring {

/// Composite Gauss-Legendre tensor-product rule on a box, d <= 2.
///
/// Each axis is split into ceil(nodes_per_axis / kPanelOrder) panels of
/// kPanelOrder nodes. The error estimate is the change when the panel count
/// is doubled plus a round-off floor, and the finer value is reported.
struct QuadratureConfig
{
    static constexpr std::size_t kPanelOrder = 10;

    std::size_t nodes_per_axis = 401;
    /// Half width of the automatic box in component standard deviations.
    double box_sd = 12.0;
    /// Overrides the automatic box when set.
    std::optional<Box> bounds;
    std::size_t threads = 1;
};

struct MonteCarloConfig
{
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    /// Work partition only; results do not depend on it.
    std::size_t chunk_size = 8192;
    std::size_t threads = 1;
};

using EngineConfig = std::variant<QuadratureConfig, MonteCarloConfig>;

enum class EngineKind { Quadrature, MonteCarlo };

struct ExpectationResult
{
    double value = 0.0;
    /// Quadrature: node-doubling difference plus round-off floor.
    /// Monte Carlo: standard error of the mean.
    double error = 0.0;
    EngineKind engine = EngineKind::Quadrature;
    /// Human-readable engine configuration, e.g. "quadrature(nodes=401,box=12sd)".
    std::string config;

    /// Half width used when comparing this result: the error itself for
    /// quadrature, five standard errors for Monte Carlo.
    double tolerance() const;
};

/// |a - b| <= a.tolerance() + b.tolerance().
bool agree(const ExpectationResult& a, const ExpectationResult& b);
/// |a.value - target| <= a.tolerance().
bool agree(const ExpectationResult& a, double target);

using PointFunction = std::function<double(const Vector&)>;

/// E_q fn = integral of fn(x) q(x) over the truncated box. Throws
/// std::invalid_argument for d > 2 and std::domain_error (naming the node)
/// when fn or q is non-finite at a node.
ExpectationResult expect_quadrature(const PointFunction& fn, const Density& q,
                                    const QuadratureConfig& config);

/// Sample mean of fn over draws x_i ~ q, with draw i taken from
/// Rng::substream(seed, i). Values are reduced in index order, so the result
/// is bitwise independent of chunk size and thread count.
ExpectationResult expect_mc(const PointFunction& fn, const Density& q,
                            const MonteCarloConfig& config);

ExpectationResult expect(const PointFunction& fn, const Density& q, const EngineConfig& engine);

std::string describe(const EngineConfig& engine);

/// Evaluates fn(i) for i in [0, count) into out[i], splitting the range into
/// chunks shared across `threads` workers.
void parallel_fill(std::size_t count, std::size_t chunk_size, std::size_t threads,
                   const std::function<double(std::size_t)>& fn, std::vector<double>& out);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values);

struct MeanAndError
{
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Mean and standard error of the mean (two-pass variance, n - 1 divisor).
MeanAndError mean_and_stderr(std::span<const double> values);

//---------------------------------------------------------------------------//
// Finite differences

/// Central-difference steps h_i = base * (1 + |x_i|).
struct StepPolicy
{
    double base = 1e-5;

    static constexpr StepPolicy gradient() { return {1e-5}; }
    static constexpr StepPolicy hessian() { return {1e-4}; }
};

using VectorFunction = std::function<Vector(const Vector&)>;

Vector fd_gradient(const PointFunction& fn, const Vector& x,
                   StepPolicy policy = StepPolicy::gradient());
/// Second differences of fn, symmetrised as (A + A^T) / 2.
Matrix fd_hessian(const PointFunction& fn, const Vector& x,
                  StepPolicy policy = StepPolicy::hessian());
/// Central-difference Jacobian of a vector field: entry (i, j) = d fn_i / d x_j.
Matrix fd_jacobian(const VectorFunction& fn, const Vector& x,
                   StepPolicy policy = StepPolicy::hessian());

}  // namespace scoring
