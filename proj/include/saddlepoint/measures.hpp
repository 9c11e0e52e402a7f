#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace saddlepoint {

/// A labeled point of a finite support. Coordinates are optional and only
/// used by instance generators; solvers see points through feature maps.
struct SupportPoint {
  std::string id;
  std::vector<double> coords;
};

/// A (possibly signed) measure with finitely many atoms. Weights are stored
/// in support order; all summations over the support are sequential in that
/// order, so results are bit-reproducible.
struct DiscreteMeasure {
  std::vector<SupportPoint> support;
  std::vector<double> weights;

  DiscreteMeasure() = default;
  DiscreteMeasure(std::vector<SupportPoint> sup, std::vector<double> w);

  std::size_t size() const { return weights.size(); }
  double total_mass() const;
};

/// Convenience constructor: points labeled "z0","z1",... with 1-d coordinates.
DiscreteMeasure make_measure(const std::vector<double>& coords,
                             const std::vector<double>& weights);

/// The constraint operator as an n x K table; row z holds the feature vector
/// theta(z). Applying it to a measure integrates the features; its adjoint
/// maps a dual vector y to the function z -> <y, theta(z)>.
struct FeatureMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  FeatureMap() = default;
  FeatureMap(std::size_t n, std::size_t k);
  FeatureMap(std::size_t n, std::size_t k, std::vector<double> entries);

  double at(std::size_t z, std::size_t k) const { return data[z * cols + k]; }
  double& at(std::size_t z, std::size_t k) { return data[z * cols + k]; }
};

using MomentVector = std::vector<double>;

/// Integrates the features against Q: returns (sum_z theta_k(z) Q_z)_k.
MomentVector push_moments(const FeatureMap& t, const DiscreteMeasure& q);

/// Adjoint action: u_z = <y, theta(z)>.
std::vector<double> adjoint_features(const FeatureMap& t,
                                     std::span<const double> y);

/// Feature map on an m x n product support whose moments are the pair of
/// marginals: theta(a_i, b_j) = (e_i, e_j). Row order is (i,j) row-major.
FeatureMap marginal_feature_map(std::size_t m, std::size_t n);

}  // namespace saddlepoint
