#pragma once

#include <optional>
#include <variant>

#include "saddlepoint/integrands.hpp"
#include "saddlepoint/measures.hpp"

namespace saddlepoint {

/// Coordinate box l <= x <= u; entries may be +-inf, equality per coordinate
/// is encoded by l_k = u_k.
struct BoxConstraint {
  MomentVector lower;
  MomentVector upper;
};

/// Equality constraint T Q = x_hat.
struct EqualityConstraint {
  MomentVector target;
};

using Constraint = std::variant<EqualityConstraint, BoxConstraint>;

/// Entropy minimization instance: reference measure, integrand family,
/// feature map and constraint set.
struct MomentProblem {
  DiscreteMeasure reference;
  IntegrandFamily family{Family::RelativeEntropy};
  FeatureMap features;
  Constraint constraint;

  void validate() const;

  bool is_equality() const {
    return std::holds_alternative<EqualityConstraint>(constraint);
  }
  const MomentVector& target() const {
    return std::get<EqualityConstraint>(constraint).target;
  }
  const BoxConstraint& box() const {
    return std::get<BoxConstraint>(constraint);
  }
};

}  // namespace saddlepoint
