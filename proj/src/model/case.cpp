#include "umpclear/model/case.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace umpclear {

namespace {

using nlohmann::json;

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw CaseParseError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

double num(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw CaseParseError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

double num_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? num(obj, key, where) : fallback;
}

int integer(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) throw CaseParseError(where + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

std::string ident(const json& obj, const std::string& fallback) {
  if (!obj.contains("id")) return fallback;
  const json& v = obj.at("id");
  return v.is_string() ? v.get<std::string>() : v.dump();
}

int bus_index(const json& obj, const std::string& key, const std::string& where) {
  return integer(obj, key, where) - 1;
}

Eigen::VectorXd vec(const json& v, const std::string& where) {
  if (!v.is_array()) throw CaseParseError(where + " must be an array");
  Eigen::VectorXd out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw CaseParseError(where + "[" + std::to_string(i) + "] must be a number");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

int parse_bus_key(const std::string& key, const std::string& where) {
  try {
    size_t used = 0;
    const int b = std::stoi(key, &used);
    if (used != key.size()) throw std::invalid_argument(key);
    return b - 1;
  } catch (const std::exception&) {
    throw CaseParseError(where + ": bus key '" + key + "' is not an integer");
  }
}

}  // namespace

SystemCase load_case(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CaseParseError(std::string("case: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw CaseParseError("case: top level must be an object");

  SystemCase c;
  c.name = doc.value("name", "");
  c.horizon = integer(doc, "horizon", "case");
  c.dt = num_or(doc, "dt", 1.0, "case");

  const json& units = field(doc, "units", "case");
  if (!units.is_array()) throw CaseParseError("case: 'units' must be an array");
  int max_bus = -1;
  for (size_t k = 0; k < units.size(); ++k) {
    const json& u = units[k];
    const std::string where = "units[" + std::to_string(k) + "]";
    Unit x;
    x.id = ident(u, "G" + std::to_string(k + 1));
    x.bus = bus_index(u, "bus", where);
    x.p_min = num(u, "p_min", where);
    x.p_max = num(u, "p_max", where);
    x.p0 = num_or(u, "p0", 0.0, where);
    x.cost_a = num(u, "cost_a", where);
    x.cost_b = num(u, "cost_b", where);
    x.cost_c = num(u, "cost_c", where);
    x.ramp_up = num(u, "ramp_up", where);
    x.ramp_down = num(u, "ramp_down", where);
    x.startup_cost = num_or(u, "startup_cost", 0.0, where);
    x.shutdown_cost = num_or(u, "shutdown_cost", 0.0, where);
    x.min_on = integer(u, "min_on", where);
    x.min_off = integer(u, "min_off", where);
    x.t0 = integer(u, "t0", where);
    max_bus = std::max(max_bus, x.bus);
    c.units.push_back(std::move(x));
  }

  const json& lines = field(doc, "lines", "case");
  if (!lines.is_array()) throw CaseParseError("case: 'lines' must be an array");
  for (size_t k = 0; k < lines.size(); ++k) {
    const json& l = lines[k];
    const std::string where = "lines[" + std::to_string(k) + "]";
    Line x;
    x.from_bus = bus_index(l, "from_bus", where);
    x.to_bus = bus_index(l, "to_bus", where);
    x.id = ident(l, std::to_string(x.from_bus + 1) + "-" + std::to_string(x.to_bus + 1));
    x.reactance = num(l, "reactance", where);
    x.capacity = num(l, "capacity", where);
    max_bus = std::max({max_bus, x.from_bus, x.to_bus});
    c.lines.push_back(std::move(x));
  }

  if (doc.contains("storage")) {
    const json& st = doc.at("storage");
    if (!st.is_array()) throw CaseParseError("case: 'storage' must be an array");
    for (size_t k = 0; k < st.size(); ++k) {
      const json& s = st[k];
      const std::string where = "storage[" + std::to_string(k) + "]";
      StorageDevice d;
      d.id = ident(s, "S" + std::to_string(k + 1));
      d.bus = bus_index(s, "bus", where);
      d.e_max = num(s, "e_max", where);
      d.e0 = num(s, "e0", where);
      d.charge_rate = num(s, "charge_rate", where);
      d.discharge_rate = num(s, "discharge_rate", where);
      d.eff_charge = num_or(s, "eff_charge", 1.0, where);
      d.eff_discharge = num_or(s, "eff_discharge", 1.0, where);
      max_bus = std::max(max_bus, d.bus);
      c.storage.push_back(std::move(d));
    }
  }

  c.num_buses = doc.contains("buses") ? integer(doc, "buses", "case") : max_bus + 1;

  const json& load = field(doc, "load", "case");
  c.load.base = vec(field(load, "base", "load"), "load.base");
  c.load.distribution = Eigen::VectorXd::Zero(c.num_buses);
  const json& dist = field(load, "distribution", "load");
  if (!dist.is_object()) throw CaseParseError("load.distribution must be an object keyed by bus");
  for (const auto& [key, v] : dist.items()) {
    const int b = parse_bus_key(key, "load.distribution");
    if (b < 0 || b >= c.num_buses) throw CaseValidationError("load.distribution: bus " + key + " out of range");
    if (!v.is_number()) throw CaseParseError("load.distribution[" + key + "] must be a number");
    c.load.distribution[b] = v.get<double>();
  }

  c.bounds = Eigen::MatrixXd::Zero(c.num_buses, c.horizon);
  if (doc.contains("uncertainty")) {
    const json& b = field(doc.at("uncertainty"), "bounds", "uncertainty");
    auto put = [&](int bus, const json& row, const std::string& where) {
      if (bus < 0 || bus >= c.num_buses) throw CaseValidationError(where + ": bus out of range");
      Eigen::VectorXd r = vec(row, where);
      if (r.size() != c.horizon)
        throw CaseValidationError(where + ": expected " + std::to_string(c.horizon) + " hourly values");
      c.bounds.row(bus) = r.transpose();
    };
    if (b.is_object()) {
      for (const auto& [key, row] : b.items())
        put(parse_bus_key(key, "uncertainty.bounds"), row, "uncertainty.bounds[" + key + "]");
    } else if (b.is_array()) {
      for (size_t k = 0; k < b.size(); ++k)
        put(static_cast<int>(k), b[k], "uncertainty.bounds[" + std::to_string(k) + "]");
    } else {
      throw CaseParseError("uncertainty.bounds must be an object or array");
    }
  }

  validate(c);
  return c;
}

SystemCase load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseParseError("cannot open case file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  SystemCase c = load_case(ss.str());
  if (c.name.empty()) c.name = path;
  return c;
}

void validate(const SystemCase& c) {
  auto fail = [](const std::string& msg) { throw CaseValidationError(msg); };
  if (c.horizon < 1) fail("horizon must be at least 1");
  if (!(c.dt > 0.0)) fail("dt must be positive");
  if (c.num_buses < 1) fail("case has no buses");
  auto bus_ok = [&](int b) { return b >= 0 && b < c.num_buses; };
  for (const auto& u : c.units) {
    const std::string w = "unit " + u.id + ": ";
    if (!bus_ok(u.bus)) fail(w + "bus out of range");
    if (u.p_min < 0.0 || u.p_min > u.p_max) fail(w + "p_min must satisfy 0 <= p_min <= p_max");
    if (!(u.ramp_up > 0.0) || !(u.ramp_down > 0.0)) fail(w + "ramp rates must be positive");
    if (u.min_on < 1 || u.min_off < 1) fail(w + "min_on and min_off must be at least 1");
    if (u.t0 == 0) fail(w + "t0 must be nonzero (hours on > 0, hours off < 0)");
    if (u.t0 > 0 && (u.p0 < u.p_min || u.p0 > u.p_max)) fail(w + "p0 outside [p_min, p_max] for an online unit");
    if (u.startup_cost < 0.0 || u.shutdown_cost < 0.0) fail(w + "negative startup/shutdown cost");
  }
  for (const auto& l : c.lines) {
    const std::string w = "line " + l.id + ": ";
    if (!bus_ok(l.from_bus) || !bus_ok(l.to_bus)) fail(w + "bus out of range");
    if (l.from_bus == l.to_bus) fail(w + "from_bus equals to_bus");
    if (!(l.reactance > 0.0)) fail(w + "reactance must be positive");
    if (!(l.capacity > 0.0)) fail(w + "capacity must be positive");
  }
  if (c.load.base.size() != c.horizon)
    fail("load.base: expected " + std::to_string(c.horizon) + " hourly values");
  if ((c.load.base.array() < 0.0).any()) fail("load.base: negative load");
  if (c.load.distribution.size() != c.num_buses) fail("load.distribution: wrong size");
  if ((c.load.distribution.array() < 0.0).any()) fail("load.distribution: negative fraction");
  if (std::abs(c.load.distribution.sum() - 1.0) > 1e-9)
    fail("load.distribution: fractions sum to " + std::to_string(c.load.distribution.sum()) + ", expected 1");
  if (c.bounds.rows() != c.num_buses || c.bounds.cols() != c.horizon) fail("uncertainty.bounds: wrong shape");
  if ((c.bounds.array() < 0.0).any()) fail("uncertainty.bounds: negative bound");
  for (const auto& s : c.storage) {
    const std::string w = "storage " + s.id + ": ";
    if (!bus_ok(s.bus)) fail(w + "bus out of range");
    if (s.e0 < 0.0 || s.e0 > s.e_max) fail(w + "e0 must lie in [0, e_max]");
    if (!(s.charge_rate > 0.0) || !(s.discharge_rate > 0.0)) fail(w + "rates must be positive");
    if (!(s.eff_charge > 0.0 && s.eff_charge <= 1.0) || !(s.eff_discharge > 0.0 && s.eff_discharge <= 1.0))
      fail(w + "efficiencies must lie in (0, 1]");
  }
}

Eigen::VectorXd bus_loads(const SystemCase& c, int t) {
  if (t < 0 || t >= c.horizon) throw std::out_of_range("bus_loads: hour out of range");
  return c.load.base[t] * c.load.distribution;
}

}  // namespace umpclear
