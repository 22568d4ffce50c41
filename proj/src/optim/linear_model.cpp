#include "umpclear/optim/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace umpclear::optim {

int LinearModel::add_variable(std::string name, double lower, double upper, double cost,
                              bool is_integer) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw std::invalid_argument("variable " + name + ": lower bound exceeds upper bound");
  if (!std::isfinite(cost)) throw std::invalid_argument("variable " + name + ": non-finite cost");
  vars_.push_back({std::move(name), lower, upper, cost, is_integer});
  return num_variables() - 1;
}

int LinearModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                                double rhs) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("constraint " + name + ": non-finite rhs");
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables())
      throw std::out_of_range("constraint " + name + ": unknown variable index");
    if (!std::isfinite(t.coef))
      throw std::invalid_argument("constraint " + name + ": non-finite coefficient");
    if (!merged.empty() && merged.back().var == t.var)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  rows_.push_back({std::move(name), std::move(merged), sense, rhs});
  return num_constraints() - 1;
}

void LinearModel::add_term(int row, int var, double coef) {
  if (var < 0 || var >= num_variables()) throw std::out_of_range("add_term: unknown variable index");
  if (!std::isfinite(coef)) throw std::invalid_argument("add_term: non-finite coefficient");
  auto& terms = rows_.at(row).terms;
  auto it = std::lower_bound(terms.begin(), terms.end(), var, [](const Term& t, int v) { return t.var < v; });
  if (it != terms.end() && it->var == var) {
    it->coef += coef;
    if (it->coef == 0.0) terms.erase(it);
  } else if (coef != 0.0) {
    terms.insert(it, {var, coef});
  }
}

void LinearModel::set_bounds(int var, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("set_bounds: lower > upper");
  auto& v = vars_.at(var);
  v.lower = lower;
  v.upper = upper;
}

bool LinearModel::has_integers() const {
  return std::any_of(vars_.begin(), vars_.end(), [](const Variable& v) { return v.is_integer; });
}

Eigen::SparseMatrix<double> LinearModel::matrix() const {
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < num_constraints(); ++i)
    for (const auto& t : rows_[i].terms) trip.emplace_back(i, t.var, t.coef);
  Eigen::SparseMatrix<double> a(num_constraints(), num_variables());
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

double LinearModel::evaluate(const Eigen::VectorXd& x) const {
  double z = constant_;
  for (int j = 0; j < num_variables(); ++j) z += vars_[j].cost * x[j];
  return z;
}

double LinearModel::max_violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_variables(); ++j) {
    worst = std::max(worst, vars_[j].lower - x[j]);
    worst = std::max(worst, x[j] - vars_[j].upper);
  }
  for (const auto& row : rows_) {
    double ax = 0.0;
    for (const auto& t : row.terms) ax += t.coef * x[t.var];
    if (row.sense != Sense::GreaterEqual) worst = std::max(worst, ax - row.rhs);
    if (row.sense != Sense::LessEqual) worst = std::max(worst, row.rhs - ax);
  }
  return worst;
}

namespace {

std::string lp_name(char prefix, int index, const std::string& name) {
  std::string out = prefix + std::to_string(index) + "_";
  for (char ch : name) out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' ? ch : '_';
  return out;
}

void lp_term(std::ostream& out, double coef, const std::string& var) {
  out << (coef < 0 ? " - " : " + ") << std::abs(coef) << ' ' << var;
}

}  // namespace

void write_lp(const LinearModel& model, std::ostream& out) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  std::vector<std::string> names;
  for (int j = 0; j < model.num_variables(); ++j) names.push_back(lp_name('x', j, model.variable(j).name));

  bool any = false;
  bool need_constant = model.objective_constant() != 0.0;
  for (const auto& row : model.constraints()) need_constant |= row.terms.empty();
  out << "Minimize\n obj:";
  for (int j = 0; j < model.num_variables(); ++j)
    if (model.variable(j).cost != 0.0) {
      lp_term(out, model.variable(j).cost, names[j]);
      any = true;
    }
  if (!any) need_constant = true;
  if (need_constant) lp_term(out, model.objective_constant(), "constant");
  out << "\nSubject To\n";
  for (int i = 0; i < model.num_constraints(); ++i) {
    const auto& row = model.constraint(i);
    out << ' ' << lp_name('c', i, row.name) << ':';
    for (const auto& t : row.terms) lp_term(out, t.coef, names[t.var]);
    if (row.terms.empty()) out << " 0 constant";
    out << (row.sense == Sense::LessEqual ? " <= " : row.sense == Sense::Equal ? " = " : " >= ") << row.rhs << '\n';
  }
  out << "Bounds\n";
  if (need_constant) out << " constant = 1\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    if (v.lower == v.upper) {
      out << ' ' << names[j] << " = " << v.lower << '\n';
      continue;
    }
    out << ' ';
    if (std::isinf(v.lower)) out << "-inf";
    else out << v.lower;
    out << " <= " << names[j] << " <= ";
    if (std::isinf(v.upper)) out << "+inf";
    else out << v.upper;
    out << '\n';
  }
  bool header = false;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (!model.variable(j).is_integer) continue;
    if (!header) out << "General\n";
    header = true;
    out << ' ' << names[j] << '\n';
  }
  out << "End\n";
  out.flags(flags);
  out.precision(prec);
}

}  // namespace umpclear::optim

