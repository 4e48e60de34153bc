#pragma once

#include <cstddef>
#include <vector>

namespace wdiffuse::measures {

/// Right-continuous nondecreasing step function g: [0,1) -> [0,1] with the
/// convention g(1) = 1. Constant value values[j] on [breakpoints[j],
/// breakpoints[j+1]); breakpoints[0] must be 0.
struct StepQuantile {
  std::vector<double> breakpoints;
  std::vector<double> values;
  double operator()(double t) const;
};

/// Equal-weight atomic measure (1/k) sum delta_{atoms[i]}; atoms sorted.
struct EmpiricalMeasure {
  std::vector<double> atoms;
};

/// Atomic measure with general weights (weights sum to 1, atoms sorted).
struct AtomicMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;
};

/// Histogram on n uniform cells of [0,1]; mass is uniformly spread within a
/// cell, so the quantile function is piecewise linear.
struct GridMeasure {
  std::vector<double> mass;
};

/// Quantile function as a polyline over [0,1]; repeated t-knots encode jumps.
/// This is the common currency for Wasserstein distances and projections.
struct QuantileFn {
  std::vector<double> t;
  std::vector<double> v;
};

QuantileFn to_quantile(const StepQuantile& g);
QuantileFn to_quantile(const EmpiricalMeasure& mu);
QuantileFn to_quantile(const AtomicMeasure& mu);
QuantileFn to_quantile(const GridMeasure& mu);

/// chi: push-forward of Leb|[0,1] under g. For a step quantile this is the
/// atomic measure with atoms values[j], weights = cell widths.
AtomicMeasure chi(const StepQuantile& g);

/// chi^-1: generalized inverse distribution function g_mu(t) =
/// inf{s: mu[0,s] > t}, inf(empty) = 1.
StepQuantile chi_inverse(const AtomicMeasure& mu);
StepQuantile chi_inverse(const EmpiricalMeasure& mu);

/// Hat function: 1 on [0,(i-1)/k], linear i-kt on [(i-1)/k,i/k], 0 after.
double hat_function(std::size_t i, std::size_t k, double t);

/// J-hat projection: coordinate i is k * int_{(i-1)/k}^{i/k} g(t) dt,
/// computed exactly for piecewise-linear/step quantiles.
std::vector<double> project_J(const QuantileFn& g, std::size_t k);
std::vector<double> project_J(const StepQuantile& g, std::size_t k);

/// iota: ordered vector -> step quantile with k uniform cells.
StepQuantile embed_iota(const std::vector<double>& x);

/// pi_k = I_k^-1 o I_k-hat: quantile-slice means of mu, as an equal-weight
/// atomic measure. Atoms straddling a cut are split fractionally (implicit in
/// the quantile-function integral).
EmpiricalMeasure project_pi_P(const AtomicMeasure& mu, std::size_t k);
EmpiricalMeasure project_pi_P(const EmpiricalMeasure& mu, std::size_t k);
EmpiricalMeasure project_pi_P(const GridMeasure& mu, std::size_t k);

/// L2 distance of quantile functions, exact for polylines.
double wasserstein_distance(const QuantileFn& a, const QuantileFn& b);
double wasserstein_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
double wasserstein_distance(const AtomicMeasure& a, const AtomicMeasure& b);

}  // namespace wdiffuse::measures
