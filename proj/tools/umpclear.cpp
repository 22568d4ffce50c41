#include "umpclear/model/network.hpp"
#include "umpclear/settlement/clearing.hpp"
#include "umpclear/uncertainty/worst_case.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace umpclear;
namespace fs = std::filesystem;

namespace {

// exit 2: bad input; exit 3: the clearing itself failed
struct InputError : std::runtime_error {
  std::string kind;
  InputError(std::string k, const std::string& what) : std::runtime_error(what), kind(std::move(k)) {}
};

struct Config {
  std::string case_path;
  double lambda = 1.0, budget = 2.0;
  bool lines = true;
  std::string mode = "robust";
  std::string out_dir = "umpclear_out";
  std::string format = "table";
  bool storage = false;
  int max_iters = 20;
  double ccg_tol = 1e-6;
  unsigned long seed = 1;
  int mc_samples = 200;
  // command-specific
  std::string portfolio;
  int hour = 21;
  std::vector<double> lambdas{0.5, 0.8, 1.0}, budgets{1.0, 2.0};
  int jobs = 0;
  bool down = false;
};

std::string num(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}
std::string money(double v) { return num(v, 2); }
std::string price(double v) { return num(v, 3); }
std::string mw(double v) { return num(v, 3); }

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '\n') ch = ' ';
    out += ch;
    if (ch == '"') out += '"';
  }
  return out + "\"";
}

// A CSV table held in memory: written to disk and optionally echoed.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& r) {
      for (size_t j = 0; j < r.size(); ++j) os << (j ? "," : "") << csv_field(r[j]);
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

// Ordered key/value report for stdout.
struct Summary {
  std::vector<std::pair<std::string, std::string>> items;
  void add(std::string k, std::string v) { items.emplace_back(std::move(k), std::move(v)); }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "text") {
      for (const auto& [k, v] : items) os << k << '=' << v << '\n';
      return;
    }
    size_t w = 0;
    for (const auto& kv : items) w = std::max(w, kv.first.size());
    for (const auto& [k, v] : items) os << k << std::string(w - k.size() + 2, ' ') << v << '\n';
  }
};

void save(const Config& cfg, const std::string& name, const Table& t) {
  fs::create_directories(cfg.out_dir);
  std::ofstream f(fs::path(cfg.out_dir) / name, std::ios::binary);
  if (!f) throw InputError("output", "cannot write " + (fs::path(cfg.out_dir) / name).string());
  t.write(f);
}

void save_summary(const Config& cfg, const std::string& name, const Summary& s) {
  fs::create_directories(cfg.out_dir);
  std::ofstream f(fs::path(cfg.out_dir) / name, std::ios::binary);
  if (!f) throw InputError("output", "cannot write " + (fs::path(cfg.out_dir) / name).string());
  s.write(f, "text");
}

void emit(const Config& cfg, const Summary& s, const Table& main) {
  if (cfg.format == "csv") main.write(std::cout);
  else s.write(std::cout, cfg.format);
}

// ---------------------------------------------------------------------------

SystemCase load(const Config& cfg) {
  if (!fs::exists(cfg.case_path)) throw InputError("case_not_found", "case file not found: " + cfg.case_path);
  SystemCase c;
  try {
    c = load_case_file(cfg.case_path);
  } catch (const CaseParseError& e) {
    throw InputError("case_parse", cfg.case_path + ": " + e.what());
  } catch (const CaseValidationError& e) {
    throw InputError("case_invalid", cfg.case_path + ": " + e.what());
  }
  if (cfg.storage && c.storage.empty()) throw InputError("no_storage", cfg.case_path + " defines no storage device");
  if (!cfg.storage) c.storage.clear();
  return c;
}

std::unique_ptr<optim::SolverBackend> backend() {
  const char* env = std::getenv("UMPCLEAR_SOLVER");
  const std::string name = env ? env : "internal";
  if (name != "internal" && name != "external")
    throw InputError("solver", "UMPCLEAR_SOLVER must be internal or external, got '" + name + "'");
  try {
    return optim::select_backend(name);
  } catch (const std::exception& e) {
    throw InputError("solver", e.what());
  }
}

// One cleared day in any mode, reduced to what the reports need.
struct Run {
  SystemCase c;
  std::string mode;
  UncertaintySet set;
  RobustSchedule schedule;
  PriceSet prices;
  SettlementReport report;
  Eigen::MatrixXd sf;
  CcgLog log;
  size_t pool = 0;
  double lp_objective = 0.0;
};

Run clear_traditional(const SystemCase& c, const UncertaintySet& set, optim::SolverBackend& be) {
  Run r;
  const TraditionalPrices tp = traditional_prices(c, build_bids(c), requirement_from_set(set), be);
  r.schedule = tp.schedule;
  r.schedule.reserve_up = tp.reserve_q_up;
  r.schedule.reserve_down = tp.reserve_q_down;
  const int nb = c.num_buses, nt = c.horizon, nl = static_cast<int>(c.lines.size());
  r.prices.lmp = tp.lmp.transpose().replicate(nb, 1);
  r.prices.ump_up = tp.reserve_up.transpose().replicate(nb, 1);
  r.prices.ump_down = tp.reserve_down.transpose().replicate(nb, 1);
  r.prices.opportunity_up = Eigen::MatrixXd::Zero(static_cast<int>(c.units.size()), nt);
  r.prices.opportunity_down = r.prices.opportunity_up;
  r.prices.mu_up = Eigen::MatrixXd::Zero(nl, nt);
  r.prices.mu_down = Eigen::MatrixXd::Zero(nl, nt);
  r.schedule.base_flows = Eigen::MatrixXd::Zero(nl, nt);
  r.lp_objective = tp.schedule.total_cost;
  return r;
}

Run clear(const Config& cfg, const SystemCase& c, double lambda, double budget, optim::SolverBackend& be) {
  if (lambda < 0 || budget < 0) throw InputError("bad_flag", "--lambda and --lambda-delta must be nonnegative");
  Run r;
  const bool det = cfg.mode == "deterministic";
  if (det) lambda = budget = 0.0;
  const UncertaintySet set = make_uncertainty_set(c, lambda, budget);
  if (cfg.mode == "traditional") {
    r = clear_traditional(c, set, be);
  } else {
    CcgOptions o;
    o.max_iterations = cfg.max_iters;
    o.tol = cfg.ccg_tol;
    o.master.transmission = cfg.lines;
    Clearing x = clear_market(c, build_bids(c), lambda, budget, o, be);
    r.schedule = std::move(x.ccg.schedule);
    r.prices = std::move(x.prices);
    r.log = std::move(x.ccg.log);
    r.pool = x.ccg.pool.size();
    r.lp_objective = x.lp.objective;
  }
  r.c = c;
  r.mode = cfg.mode;
  r.set = set;
  r.sf = c.lines.empty() || !cfg.lines ? Eigen::MatrixXd(0, c.num_buses) : compute_shift_factors(c.lines, c.num_buses);
  r.report = settle(c, set, r.schedule, r.prices);
  return r;
}

Run clear(const Config& cfg) {
  const SystemCase c = load(cfg);
  auto be = backend();
  return clear(cfg, c, cfg.lambda, cfg.budget, *be);
}

// Worst redispatch slack over sampled members of the set.
double monte_carlo(const Run& r, unsigned long seed, int samples) {
  if (r.mode == "traditional") return 0.0;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int n = 0; n < samples; ++n)
    for (int t = 0; t < r.c.horizon; ++t)
      worst = std::max(worst, redispatch_violation(r.c, r.sf, r.schedule, t, sample_member(r.set, t, rng)));
  return worst;
}

// ---------------------------------------------------------------------------
// Reports.

Table prices_table(const Run& r) {
  Table t{{"t", "bus", "lmp", "ump_up", "ump_down"}, {}};
  for (int h = 0; h < r.c.horizon; ++h)
    for (int b = 0; b < r.c.num_buses; ++b)
      t.rows.push_back({std::to_string(h + 1), std::to_string(b + 1), price(r.prices.lmp(b, h)),
                        price(r.prices.ump_up(b, h)), price(r.prices.ump_down(b, h))});
  return t;
}

// Credits positive, charges negative.
Table settlement_table(const Run& r) {
  Table t{{"participant", "hour", "component", "amount"}, {}};
  const SettlementReport& s = r.report;
  const int nt = r.c.horizon;
  auto rows = [&](const std::string& who, const std::string& what, auto value) {
    for (int h = 0; h < nt; ++h) t.rows.push_back({who, std::to_string(h + 1), what, money(value(h))});
  };
  for (size_t i = 0; i < r.c.units.size(); ++i) {
    const int u = static_cast<int>(i);
    rows(r.c.units[i].id, "energy", [&](int h) { return s.energy.generator(u, h); });
    rows(r.c.units[i].id, "reserve", [&](int h) { return s.theta(u, h); });
  }
  for (size_t d = 0; d < r.c.storage.size(); ++d) {
    const int k = static_cast<int>(d);
    rows(r.c.storage[d].id, "energy", [&](int h) { return s.energy.storage(k, h); });
    rows(r.c.storage[d].id, "reserve", [&](int h) { return s.storage_theta.size() ? s.storage_theta(k, h) : 0.0; });
  }
  for (int b = 0; b < r.c.num_buses; ++b)
    if (r.c.load.distribution[b] != 0.0)
      rows("load_bus" + std::to_string(b + 1), "energy", [&](int h) { return -s.energy.load(b, h); });
  for (int b = 0; b < r.c.num_buses; ++b)
    if (r.c.bounds.row(b).maxCoeff() > 0.0)
      rows("uncertainty_bus" + std::to_string(b + 1), "uncertainty", [&](int h) { return -s.psi(b, h); });
  rows("operator", "residue", [&](int h) { return s.residue[h]; });
  rows("operator", "congestion_rent", [&](int h) { return s.congestion_rent.size() ? s.congestion_rent[h] : 0.0; });
  return t;
}

Table schedule_table(const Run& r) {
  Table t{{"unit", "hour", "commit", "dispatch", "reserve_up", "reserve_down"}, {}};
  for (size_t i = 0; i < r.c.units.size(); ++i)
    for (int h = 0; h < r.c.horizon; ++h) {
      const int u = static_cast<int>(i);
      t.rows.push_back({r.c.units[i].id, std::to_string(h + 1), std::to_string(r.schedule.commitment(u, h)),
                        mw(r.schedule.dispatch(u, h)), mw(r.schedule.reserve_up(u, h)),
                        mw(r.schedule.reserve_down(u, h))});
    }
  return t;
}

Table storage_table(const Run& r) {
  Table t{{"device", "hour", "energy", "discharge", "charge", "net_injection"}, {}};
  for (size_t d = 0; d < r.schedule.storage.size(); ++d) {
    const StorageSchedule& s = r.schedule.storage[d];
    for (int h = 0; h < r.c.horizon; ++h)
      t.rows.push_back({r.c.storage[d].id, std::to_string(h + 1), mw(s.energy[h]), mw(s.discharge[h]),
                        mw(s.charge[h]), mw(s.net_injection(h))});
  }
  return t;
}

Table ccg_table(const Run& r) {
  Table t{{"iteration", "master_cost", "max_violation", "worst_hour", "added", "nodes"}, {}};
  int n = 0;
  for (const auto& it : r.log.iterations)
    t.rows.push_back({std::to_string(++n), money(it.master_cost), num(it.max_violation, 6),
                      std::to_string(it.worst_hour + 1), it.added ? "yes" : "no", std::to_string(it.nodes)});
  return t;
}

Summary run_summary(const Config& cfg, const Run& r) {
  Summary s;
  s.add("case", r.c.name);
  s.add("mode", r.mode);
  s.add("lambda", num(r.set.bus_budget, 3));
  s.add("lambda_delta", num(r.set.system_budget, 3));
  s.add("cost", money(r.schedule.total_cost));
  if (r.mode != "traditional") {
    s.add("ccg_rounds", std::to_string(r.log.iterations.size()));
    s.add("scenarios", std::to_string(r.pool));
  }
  s.add("sum_psi", money(r.report.psi.sum()));
  s.add("sum_theta", money(r.report.theta.sum() + (r.report.storage_theta.size() ? r.report.storage_theta.sum() : 0.0)));
  s.add("residue", money(r.report.residue.sum()));
  if (cfg.mc_samples > 0 && r.mode != "traditional") {
    s.add("mc_samples", std::to_string(cfg.mc_samples));
    s.add("mc_seed", std::to_string(cfg.seed));
    s.add("mc_max_slack", num(monte_carlo(r, cfg.seed, cfg.mc_samples), 6));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Commands.

int cmd_solve(const Config& cfg) {
  const Run r = clear(cfg);
  const Summary s = run_summary(cfg, r);
  save(cfg, "schedule.csv", schedule_table(r));
  save(cfg, "prices.csv", prices_table(r));
  save(cfg, "settlement.csv", settlement_table(r));
  if (r.mode != "traditional") save(cfg, "ccg_log.csv", ccg_table(r));
  if (!r.schedule.storage.empty()) save(cfg, "storage.csv", storage_table(r));
  save_summary(cfg, "summary.txt", s);
  emit(cfg, s, schedule_table(r));
  return 0;
}

int cmd_price(const Config& cfg) {
  const Run r = clear(cfg);
  const Table t = prices_table(r);
  save(cfg, "prices.csv", t);
  if (cfg.format == "csv") {
    t.write(std::cout);
    return 0;
  }
  Summary s;
  s.add("cost", money(r.schedule.total_cost));
  const int h = std::clamp(cfg.hour, 1, r.c.horizon) - 1;
  for (int b = 0; b < r.c.num_buses; ++b)
    s.add("bus" + std::to_string(b + 1) + "_t" + std::to_string(h + 1),
          "lmp " + price(r.prices.lmp(b, h)) + " ump_up " + price(r.prices.ump_up(b, h)) + " ump_down " +
              price(r.prices.ump_down(b, h)));
  s.write(std::cout, cfg.format);
  return 0;
}

int cmd_settle(const Config& cfg) {
  const Run r = clear(cfg);
  const Table t = settlement_table(r);
  save(cfg, "settlement.csv", t);
  Summary s;
  const SettlementReport& rep = r.report;
  for (size_t i = 0; i < r.c.units.size(); ++i)
    s.add(r.c.units[i].id + "_reserve", money(rep.theta.row(static_cast<int>(i)).sum()));
  for (int b = 0; b < r.c.num_buses; ++b)
    if (r.c.bounds.row(b).maxCoeff() > 0.0) s.add("uncertainty_bus" + std::to_string(b + 1), money(-rep.psi.row(b).sum()));
  s.add("residue", money(rep.residue.sum()));
  s.add("min_hourly_residue", money(rep.residue.minCoeff()));
  emit(cfg, s, t);
  return 0;
}

Eigen::VectorXd read_portfolio(const std::string& path, int num_buses) {
  if (path.empty()) throw InputError("bad_flag", "ftr needs --portfolio");
  std::ifstream f(path);
  if (!f) throw InputError("portfolio_not_found", "portfolio file not found: " + path);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(num_buses);
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (line.empty() || line[0] == '#' || line.rfind("bus", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    int bus;
    double amount;
    if (!(is >> bus >> amount)) throw InputError("portfolio_parse", path + ":" + std::to_string(n) + ": expected bus,amount");
    if (bus < 1 || bus > num_buses) throw InputError("portfolio_parse", path + ":" + std::to_string(n) + ": no bus " + std::to_string(bus));
    p[bus - 1] += amount;
  }
  if (std::abs(p.sum()) > 1e-3)
    throw InputError("unbalanced_portfolio", path + ": injections sum to " + num(p.sum(), 4) + " MW, not zero");
  return p;
}

int cmd_ftr(const Config& cfg) {
  const SystemCase c = load(cfg);
  const Eigen::VectorXd f = read_portfolio(cfg.portfolio, c.num_buses);
  if (cfg.hour < 1 || cfg.hour > c.horizon) throw InputError("bad_flag", "--hour out of range");
  auto be = backend();
  const Run r = clear(cfg, c, cfg.lambda, cfg.budget, *be);
  const int h = cfg.hour - 1;
  const SftResult sft = ftr_sft(f, r.sf, c.lines, 1e-6, 1e-4);
  const FtrAccount a = ftr_settle(f, r.sf, r.prices, r.schedule, h);
  Table t{{"line", "capacity", "ftr_flow", "base_flow", "shadow_price"}, {}};
  for (size_t l = 0; l < c.lines.size(); ++l) {
    const int k = static_cast<int>(l);
    t.rows.push_back({c.lines[l].id, mw(c.lines[l].capacity), num(a.ftr_flows[k], 4), num(a.base_flows[k], 4),
                      price(a.shadow[k])});
  }
  save(cfg, "ftr.csv", t);
  Summary s;
  s.add("hour", std::to_string(cfg.hour));
  s.add("sft", sft.feasible ? "pass" : "fail");
  s.add("credit", money(a.credit));
  s.add("rent", money(a.rent));
  s.add("underfunding", money(a.underfunding));
  s.add("residue", money(r.report.residue[h]));
  s.add("covered", a.underfunding <= r.report.residue[h] + 0.5 ? "yes" : "no");
  save_summary(cfg, "ftr_summary.txt", s);
  emit(cfg, s, t);
  return 0;
}

int cmd_heatmap(const Config& cfg) {
  const Run r = clear(cfg);
  // downward prices are stored as nonpositive; the map shows magnitudes
  const Eigen::MatrixXd m = cfg.down ? Eigen::MatrixXd(-r.prices.ump_down) : r.prices.ump_up;
  Table t{{"bus"}, {}};
  for (int h = 0; h < r.c.horizon; ++h) t.header.push_back(std::to_string(h + 1));
  for (int b = 0; b < r.c.num_buses; ++b) {
    std::vector<std::string> row{std::to_string(b + 1)};
    for (int h = 0; h < r.c.horizon; ++h) row.push_back(price(m(b, h)));
    t.rows.push_back(std::move(row));
  }
  save(cfg, cfg.down ? "heatmap_down.csv" : "heatmap.csv", t);
  if (cfg.format == "csv") {
    t.write(std::cout);
    return 0;
  }
  Summary s;
  Eigen::Index bb = 0, hh = 0;
  const double peak = m.maxCoeff(&bb, &hh);
  s.add("peak", price(peak) + " at bus " + std::to_string(bb + 1) + " hour " + std::to_string(hh + 1));
  s.write(std::cout, cfg.format);
  return 0;
}

int cmd_compare(const Config& cfg) {
  const SystemCase c = load(cfg);
  auto be = backend();
  Config rob = cfg, trad = cfg;
  rob.mode = "robust";
  trad.mode = "traditional";
  rob.lines = false;  // both models without transmission limits
  const Run a = clear(rob, c, cfg.lambda, cfg.budget, *be);
  const Run b = clear(trad, c, cfg.lambda, cfg.budget, *be);
  Table t{{"t", "lmp_robust", "lmp_traditional", "ump_up", "reserve_price_up", "ump_down", "reserve_price_down"}, {}};
  double gap = 0.0;
  for (int h = 0; h < c.horizon; ++h) {
    for (int k = 0; k < c.num_buses; ++k) {
      gap = std::max(gap, std::abs(a.prices.ump_up(k, h) - b.prices.ump_up(0, h)));
      gap = std::max(gap, std::abs(a.prices.ump_down(k, h) - b.prices.ump_down(0, h)));
    }
    t.rows.push_back({std::to_string(h + 1), price(a.prices.lmp(0, h)), price(b.prices.lmp(0, h)),
                      price(a.prices.ump_up(0, h)), price(b.prices.ump_up(0, h)), price(a.prices.ump_down(0, h)),
                      price(b.prices.ump_down(0, h))});
  }
  save(cfg, "compare.csv", t);
  Summary s;
  s.add("cost_robust", money(a.schedule.total_cost));
  s.add("cost_traditional", money(b.schedule.total_cost));
  s.add("max_ump_reserve_price_gap", price(gap));
  s.add("sum_psi", money(a.report.psi.sum()));
  s.add("sum_theta", money(a.report.theta.sum()));
  s.add("traditional_reserve_credit", money(b.report.theta.sum()));
  save_summary(cfg, "compare_summary.txt", s);
  emit(cfg, s, t);
  return 0;
}

int cmd_sweep(const Config& cfg) {
  if (cfg.lambdas.empty() || cfg.budgets.empty()) throw InputError("bad_flag", "sweep grids must be nonempty");
  const SystemCase c = load(cfg);
  struct Cell {
    double lambda, budget;
    bool ok = false;
    std::string status;
    double cost = 0, psi = 0, theta = 0, residue = 0;
  };
  std::vector<Cell> cells;
  for (double ld : cfg.budgets)
    for (double l : cfg.lambdas) cells.push_back({l, ld});

  backend();  // fail early on a bad solver choice
  std::atomic<size_t> next{0};
  auto work = [&] {
    auto be = backend();
    for (size_t i; (i = next++) < cells.size();) {
      Cell& cell = cells[i];
      try {
        const Run r = clear(cfg, c, cell.lambda, cell.budget, *be);
        cell.cost = r.schedule.total_cost;
        cell.psi = r.report.psi.sum();
        cell.theta = r.report.theta.sum() + (r.report.storage_theta.size() ? r.report.storage_theta.sum() : 0.0);
        cell.residue = r.report.residue.sum();
        cell.ok = true;
        cell.status = "ok";
      } catch (const std::exception& e) {
        cell.status = std::string("error: ") + e.what();
      }
    }
  };
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int n = std::clamp(cfg.jobs > 0 ? cfg.jobs : hw, 1, static_cast<int>(cells.size()));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  // audit: cost nondecreasing in lambda at fixed lambda_delta and vice versa
  constexpr double kSlack = 0.5;
  Table t{{"lambda_delta", "lambda", "status", "cost", "sum_psi", "sum_theta", "residue", "monotone"}, {}};
  Summary s;
  int violations = 0, failed = 0;
  for (size_t i = 0; i < cells.size(); ++i) {
    const Cell& x = cells[i];
    std::string mono = "n/a";
    if (x.ok) {
      bool ok = true;
      for (size_t j = 0; j < cells.size(); ++j) {
        const Cell& y = cells[j];
        if (!y.ok || j == i) continue;
        const bool below = (y.budget == x.budget && y.lambda < x.lambda) || (y.lambda == x.lambda && y.budget < x.budget);
        if (below && y.cost > x.cost + kSlack) ok = false;
      }
      mono = ok ? "yes" : "no";
      violations += !ok;
    } else {
      ++failed;
    }
    t.rows.push_back({num(x.budget, 3), num(x.lambda, 3), x.status, x.ok ? money(x.cost) : "", x.ok ? money(x.psi) : "",
                      x.ok ? money(x.theta) : "", x.ok ? money(x.residue) : "", mono});
  }
  save(cfg, "sweep.csv", t);
  s.add("cells", std::to_string(cells.size()));
  s.add("failed", std::to_string(failed));
  s.add("monotone", violations ? "no (" + std::to_string(violations) + " cells)" : "yes");
  save_summary(cfg, "sweep_audit.txt", s);
  emit(cfg, s, t);
  return failed ? 3 : 0;
}

void error_record(const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust market clearing with uncertainty marginal prices"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--case", cfg.case_path, "case file (JSON)")->required();
    sub->add_option("--lambda", cfg.lambda, "bus uncertainty level")->capture_default_str();
    sub->add_option("--lambda-delta", cfg.budget, "system uncertainty budget")->capture_default_str();
    sub->add_option("--mode", cfg.mode, "robust | traditional | deterministic")
        ->check(CLI::IsMember({"robust", "traditional", "deterministic"}))
        ->capture_default_str();
    sub->add_option("--out-dir", cfg.out_dir, "output directory")->capture_default_str();
    sub->add_option("--format", cfg.format, "stdout format: table | csv | text")
        ->check(CLI::IsMember({"table", "csv", "text"}))
        ->capture_default_str();
    sub->add_flag("--storage", cfg.storage, "attach the case's storage devices");
    sub->add_option("--max-iters", cfg.max_iters, "CCG iteration limit")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--ccg-tol", cfg.ccg_tol, "CCG violation tolerance, MW")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", cfg.seed, "Monte-Carlo seed")->capture_default_str();
    sub->add_option("--mc-samples", cfg.mc_samples, "Monte-Carlo members (full days)")->capture_default_str()->check(CLI::NonNegativeNumber);
  };

  auto* solve = app.add_subcommand("solve", "clear the market and write all reports");
  auto* price_cmd = app.add_subcommand("price", "write nodal prices");
  auto* settle_cmd = app.add_subcommand("settle", "write the settlement ledger");
  auto* ftr = app.add_subcommand("ftr", "audit an FTR portfolio against congestion rent");
  auto* sweep = app.add_subcommand("sweep", "clear over a grid of uncertainty levels");
  auto* heat = app.add_subcommand("heatmap", "bus x hour uncertainty price matrix");
  auto* compare = app.add_subcommand("compare-traditional", "robust vs reserve-requirement clearing without lines");
  for (auto* s : {solve, price_cmd, settle_cmd, ftr, sweep, heat, compare}) common(s);
  price_cmd->add_option("--hour", cfg.hour, "hour shown on stdout")->capture_default_str();
  ftr->add_option("--portfolio", cfg.portfolio, "CSV of bus,amount (MW, injections positive)")->required();
  ftr->add_option("--hour", cfg.hour, "settlement hour (1-based)")->capture_default_str();
  sweep->add_option("--lambdas", cfg.lambdas, "bus levels")->delimiter(',')->capture_default_str();
  sweep->add_option("--lambda-deltas", cfg.budgets, "system budgets")->delimiter(',')->capture_default_str();
  sweep->add_option("--jobs", cfg.jobs, "worker threads (0 = all cores)")->capture_default_str();
  heat->add_flag("--down", cfg.down, "downward prices instead of upward");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) return cmd_solve(cfg);
    if (*price_cmd) return cmd_price(cfg);
    if (*settle_cmd) return cmd_settle(cfg);
    if (*ftr) return cmd_ftr(cfg);
    if (*sweep) return cmd_sweep(cfg);
    if (*heat) return cmd_heatmap(cfg);
    if (*compare) return cmd_compare(cfg);
  } catch (const InputError& e) {
    error_record(e.kind, e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    error_record("invalid_input", e.what());
    return 2;
  } catch (const std::exception& e) {
    error_record("clearing_failed", e.what());
    return 3;
  }
  return 1;
}
