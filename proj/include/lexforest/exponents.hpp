#pragma once

#include "lexforest/exponent.hpp"
#include "lexforest/model.hpp"

namespace lexf {

/// Random exponent of a coordinate for this try's uniform draw r: the unique
/// lambda with sum_j p_j / ((1-r) p_{j*}^lambda + r) = 1, or infinity when
/// r >= sum_j p_j. Monotone nondecreasing in r. |residual| <= tol at the
/// returned value.
Exponent random_exponent(const CoordinateDistribution& coord, double r, double tol = 1e-10);

/// Closed form for a marginally Bernoulli(1/2) coordinate with agreement
/// probability p: -log2(max((p-r)/(1-r), 0)).
Exponent bernoulli_exponent(double p, double r);

/// The r->0 limit: lambda with sum_j p_j p_{j*}^{-lambda} = 1. Infinity when
/// the coordinate has no agreement mass.
Exponent greedy_exponent(const CoordinateDistribution& coord, double tol = 1e-10);

enum class SparseMode { asymptotic, conservative };

/// Sparse-regime approximations for binary coordinates. The asymptotic mode
/// evaluates ln[1 - 1/((1-r)(1+p11/(p01+p10)))]/ln(p_{1*}) (infinity when the
/// log argument is <= 0); the conservative mode returns lambda~ with
/// 1/lambda~ = (1-r)(p11/(p01+p10)) ln(1/p_{1*}).
Exponent sparse_exponent(const CoordinateDistribution& coord, double r, SparseMode mode);

}  // namespace lexf
