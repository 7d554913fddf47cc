#include "nev/esdg.hpp"

#include <stdexcept>

namespace nev {

PairPayoff pair_payoff(Strategy supply_strategy, Strategy demand_strategy,
                       const EsdgParams& esdg) {
  double supply = supply_strategy == demand_strategy
                      ? esdg.gamma + esdg.epsilon
                      : esdg.gamma - esdg.mismatch_discount();
  return {supply, esdg.b};
}

GroupPayoff group_payoff(const PopulationProfile& profile,
                         const EsdgParams& esdg) {
  if (profile.supply.empty() || profile.demand.empty()) {
    throw std::invalid_argument("group_payoff: both populations must be non-empty");
  }
  GroupPayoff total;
  for (Strategy si : profile.supply) {
    for (Strategy sj : profile.demand) {
      total.supply_total += pair_payoff(si, sj, esdg).supply;
    }
  }
  total.demand_total = static_cast<double>(profile.supply.size()) *
                       static_cast<double>(profile.demand.size()) * esdg.b;
  return total;
}

}  // namespace nev
