#ifndef NEV_ESDG_HPP
#define NEV_ESDG_HPP

#include <cstddef>
#include <vector>

#include "nev/core.hpp"

namespace nev {

enum class Strategy { Cooperate, Defect };

/// Strategy assignment for one supply population and one demand
/// population; both must be non-empty.
struct PopulationProfile {
  std::vector<Strategy> supply;
  std::vector<Strategy> demand;
};

struct PairPayoff {
  double supply = 0.0;
  double demand = 0.0;
};

/// One supply/demand encounter: the supply player earns gamma + epsilon on
/// a strategy match and gamma - delta*epsilon on a mismatch; the demand
/// player earns the constant b either way.
PairPayoff pair_payoff(Strategy supply_strategy, Strategy demand_strategy,
                       const EsdgParams& esdg);

struct GroupPayoff {
  double supply_total = 0.0;
  double demand_total = 0.0;
};

/// Totals over all supply x demand pairs. The demand total is
/// N_supply * N_demand * b regardless of strategies.
GroupPayoff group_payoff(const PopulationProfile& profile,
                         const EsdgParams& esdg);

}  // namespace nev

#endif
