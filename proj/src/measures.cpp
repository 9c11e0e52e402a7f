#include "saddlepoint/measures.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace saddlepoint {

DiscreteMeasure::DiscreteMeasure(std::vector<SupportPoint> sup,
                                 std::vector<double> w)
    : support(std::move(sup)), weights(std::move(w)) {
  if (support.size() != weights.size())
    throw std::invalid_argument("measure: support/weight size mismatch");
  std::unordered_set<std::string> seen;
  for (const auto& p : support) {
    if (!seen.insert(p.id).second)
      throw std::invalid_argument("measure: duplicate support id '" + p.id +
                                  "'");
  }
  for (double v : weights) {
    if (!std::isfinite(v))
      throw std::invalid_argument("measure: non-finite weight");
  }
}

double DiscreteMeasure::total_mass() const {
  double s = 0.0;
  for (double v : weights) s += v;
  return s;
}

DiscreteMeasure make_measure(const std::vector<double>& coords,
                             const std::vector<double>& weights) {
  if (coords.size() != weights.size())
    throw std::invalid_argument("make_measure: size mismatch");
  std::vector<SupportPoint> sup(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    sup[i].id = "z" + std::to_string(i);
    sup[i].coords = {coords[i]};
  }
  return DiscreteMeasure(std::move(sup), weights);
}

FeatureMap::FeatureMap(std::size_t n, std::size_t k)
    : rows(n), cols(k), data(n * k, 0.0) {
  if (k < 1) throw std::invalid_argument("feature map: K must be >= 1");
}

FeatureMap::FeatureMap(std::size_t n, std::size_t k,
                       std::vector<double> entries)
    : rows(n), cols(k), data(std::move(entries)) {
  if (k < 1) throw std::invalid_argument("feature map: K must be >= 1");
  if (data.size() != n * k)
    throw std::invalid_argument("feature map: entry count mismatch");
  for (double v : data) {
    if (!std::isfinite(v))
      throw std::invalid_argument("feature map: non-finite entry");
  }
}

MomentVector push_moments(const FeatureMap& t, const DiscreteMeasure& q) {
  if (q.size() != t.rows)
    throw std::invalid_argument("push_moments: support size != feature rows");
  MomentVector x(t.cols, 0.0);
  for (std::size_t z = 0; z < t.rows; ++z)
    for (std::size_t k = 0; k < t.cols; ++k)
      x[k] += t.at(z, k) * q.weights[z];
  return x;
}

std::vector<double> adjoint_features(const FeatureMap& t,
                                     std::span<const double> y) {
  if (y.size() != t.cols)
    throw std::invalid_argument("adjoint_features: y length != feature cols");
  std::vector<double> u(t.rows, 0.0);
  for (std::size_t z = 0; z < t.rows; ++z) {
    double s = 0.0;
    for (std::size_t k = 0; k < t.cols; ++k) s += y[k] * t.at(z, k);
    u[z] = s;
  }
  return u;
}

FeatureMap marginal_feature_map(std::size_t m, std::size_t n) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("marginal_feature_map: m,n must be >= 1");
  FeatureMap t(m * n, m + n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      t.at(i * n + j, i) = 1.0;
      t.at(i * n + j, m + j) = 1.0;
    }
  return t;
}

}  // namespace saddlepoint
