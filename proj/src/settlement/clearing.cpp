#include "umpclear/settlement/clearing.hpp"

namespace umpclear {

Clearing clear_market(const SystemCase& c, const std::vector<PiecewiseBid<double>>& bids, double lambda,
                      double budget, const CcgOptions& options, optim::SolverBackend& backend) {
  Clearing out;
  out.set = make_uncertainty_set(c, lambda, budget);
  out.ccg = run_ccg(c, bids, out.set, options, backend);
  out.rsced = build_rsced(c, bids, out.ccg.schedule, out.ccg.pool, options.master);
  out.lp = backend.lp(out.rsced.model);
  if (!out.lp.optimal())
    throw optim::SolverError(std::string("RSCED not optimal: ") + optim::to_string(out.lp.status));
  out.prices = extract_prices(c, out.rsced, out.lp);
  out.report = settle(c, out.set, out.ccg.schedule, out.prices);
  return out;
}

}  // namespace umpclear
