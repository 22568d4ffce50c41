#pragma once

#include "umpclear/ccg/ccg.hpp"
#include "umpclear/pricing/pricing.hpp"
#include "umpclear/settlement/settlement.hpp"

namespace umpclear {

// One cleared day: robust schedule, RSCED duals, prices and settlement.
struct Clearing {
  UncertaintySet set;
  CcgResult ccg;
  MasterModel rsced;
  optim::SolveResult lp;
  PriceSet prices;
  SettlementReport report;
};

Clearing clear_market(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids, double lambda,
                      double budget, const CcgOptions& options, optim::SolverBackend& backend);

}  // namespace umpclear
