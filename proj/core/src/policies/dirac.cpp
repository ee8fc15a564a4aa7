#include "epg/policies/dirac.hpp"

namespace epg {

DiracPolicy::DiracPolicy(LinearMap action_map, Vector theta) : map_(std::move(action_map)) {
  if (theta.size() != map_.n_params()) {
    throw ConfigError("DiracPolicy: expected " + std::to_string(map_.n_params()) + " parameters, got " +
                      std::to_string(theta.size()));
  }
  theta_ = std::move(theta);
}

ActionSample DiracPolicy::sample(const State& s, Rng&) const {
  Vector a = action(s);
  return {a, a};
}

double DiracPolicy::log_prob(const State&, const Vector&) const {
  throw DomainError("DiracPolicy: a point mass has no density");
}

GradientEstimate DiracPolicy::grad_log_prob(const State&, const Vector&) const {
  throw DomainError("DiracPolicy: a point mass has no score function");
}

}  // namespace epg
