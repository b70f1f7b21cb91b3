#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "scoring/densities.hpp"
#include "scoring/rng.hpp"

namespace scoring::testing {

struct Family
{
    std::string name;
    DensityPtr density;
};

inline Matrix spd2(double a, double b, double c)
{
    Matrix m(2, 2);
    m << a, b, b, c;
    return m;
}

// Every built-in family, in one and two dimensions, with both mixture paths.
inline std::vector<Family> all_families()
{
    std::vector<Vector> pts2;
    std::vector<Vector> pts1;
    for (int i = 0; i < 9; ++i)
    {
        pts2.push_back(Vector{{std::sin(1.7 * i), std::cos(0.9 * i)}});
        pts1.push_back(Vector::Constant(1, std::sin(2.3 * i)));
    }
    return {
        {"gaussian-1d", gaussian_iso(Vector::Constant(1, 0.4), 1.7)},
        {"gaussian-2d", gaussian(Vector{{0.5, -1.0}}, spd2(1.5, 0.3, 0.8))},
        {"gaussian-3d", gaussian_iso(Vector{{0.1, 0.2, -0.3}}, 0.8)},
        {"logistic-1d", logistic_product(Vector::Constant(1, 0.3), Vector::Constant(1, 0.8))},
        {"logistic-2d", logistic_product(Vector{{0.2, -0.4}}, Vector{{0.7, 1.3}})},
        {"mixture-1d", gaussian_mixture({0.5, 0.5}, {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)},
                                        {Matrix::Identity(1, 1), Matrix::Identity(1, 1)})},
        {"mixture-2d", gaussian_mixture({0.3, 0.7}, {Vector{{-1.0, 0.5}}, Vector{{1.0, 0.0}}},
                                        {spd2(1.5, 0.3, 0.8), spd2(0.6, -0.2, 1.1)})},
        {"kde-1d", kde(pts1, 0.5)},
        {"kde-2d", kde(pts2, 0.6)},
        {"logistic-mixture-1d",
         mixture_path(gaussian_iso(Vector::Zero(1), 1.0),
                      logistic_product(Vector::Constant(1, 1.0), Vector::Constant(1, 0.5)), 0.3)},
    };
}

inline Vector normal_point(Rng& rng, std::size_t dim, double scale = 1.0)
{
    std::normal_distribution<double> normal(0.0, scale);
    Vector x(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x[i] = normal(rng);
    return x;
}

// Relative error with an absolute floor of 1 in the denominator: entries that
// should vanish are compared absolutely.
inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

template <class A, class B>
double max_rel_err(const A& a, const B& b)
{
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        worst = std::max(worst, rel_err(a.data()[i], b.data()[i]));
    return worst;
}

}  // namespace scoring::testing
