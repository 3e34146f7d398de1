#pragma once

#include <map>
#include <span>
#include <vector>

namespace avp
{

/// Per-spot probability that another vehicle has parked or will park there.
struct BeliefMap
{
  std::vector<double> beliefs;
  double time{0.0};

  int size() const { return static_cast<int>(beliefs.size()); }
  double operator[](int i) const { return beliefs[i]; }
};

/// Spot index -> intention probability, for one dynamic vehicle.
using SpotIntents = std::map<int, double>;

BeliefMap init_beliefs(int n_spot);

/// Observed vacant spots drop to 0, observed occupied spots rise to 1, the rest keep their value.
BeliefMap observation_update(const BeliefMap & prev, std::span<const int> vacant, std::span<const int> occupied);

/// Vacant spots get the probability that at least one vehicle intends to park there; every
/// other spot keeps its observation-updated value.
BeliefMap intention_update(
  const BeliefMap & initial, std::span<const int> vacant, std::span<const SpotIntents> intents);

}  // namespace avp
