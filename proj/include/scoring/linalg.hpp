#pragma once

#include <Eigen/Core>

namespace scoring {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Second-order local data of log p at a point: log p(x), sigma = grad log p(x),
/// H = Hessian of log p(x). Local scoring rules see a density only through this.
struct LocalData
{
    double log_density = 0.0;
    Vector grad;
    Matrix hess;
};

/// Axis-aligned integration box.
struct Box
{
    Vector lower;
    Vector upper;
};

}  // namespace scoring
