#include "avp/belief.hpp"

#include <stdexcept>
#include <string>

namespace avp
{

namespace
{

void check_index(int i, int n)
{
  if (i < 0 || i >= n) {
    throw std::invalid_argument("belief: spot index " + std::to_string(i) + " out of range");
  }
}

}  // namespace

BeliefMap init_beliefs(int n_spot)
{
  if (n_spot < 1) {
    throw std::invalid_argument("init_beliefs: lot has no spots");
  }
  return {std::vector<double>(n_spot, 0.5), 0.0};
}

BeliefMap observation_update(const BeliefMap & prev, std::span<const int> vacant, std::span<const int> occupied)
{
  const int n = prev.size();
  std::vector<char> is_vacant(n, 0);
  for (int i : vacant) {
    check_index(i, n);
    is_vacant[i] = 1;
  }
  BeliefMap out = prev;
  for (int i : occupied) {
    check_index(i, n);
    if (is_vacant[i]) {
      throw std::invalid_argument("observation_update: spot " + std::to_string(i) + " both vacant and occupied");
    }
    out.beliefs[i] = 1.0;
  }
  for (int i : vacant) {
    out.beliefs[i] = 0.0;
  }
  return out;
}

BeliefMap intention_update(
  const BeliefMap & initial, std::span<const int> vacant, std::span<const SpotIntents> intents)
{
  const int n = initial.size();
  // Product of (1 - eta) over every intent entry per spot.
  std::vector<double> none_parks(n, 1.0);
  for (const auto & vehicle : intents) {
    for (const auto & [spot, eta] : vehicle) {
      check_index(spot, n);
      if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument("intention_update: probability outside [0, 1]");
      }
      none_parks[spot] *= 1.0 - eta;
    }
  }
  BeliefMap out = initial;
  for (int i : vacant) {
    check_index(i, n);
    out.beliefs[i] = 1.0 - none_parks[i];
  }
  return out;
}

}  // namespace avp
