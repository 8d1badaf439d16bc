#include "exgen/bayes_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>

#include <json.hpp>

#include "exgen/error.hpp"

namespace exgen {

namespace {

constexpr std::size_t kEnumerationBound = std::size_t(1) << 22;

std::string role_name(Role r) {
  switch (r) {
    case Role::Feature: return "feature";
    case Role::Specification: return "specification";
    case Role::Selection: return "selection";
  }
  return "?";
}

Role role_from(const std::string& s) {
  if (s == "feature") return Role::Feature;
  if (s == "specification") return Role::Specification;
  if (s == "selection") return Role::Selection;
  throw ContractViolation("unknown variable role '" + s + "'");
}

std::vector<int> decode(std::size_t idx, const std::vector<int>& card) {
  std::vector<int> v(card.size());
  for (std::size_t k = card.size(); k-- > 0;) {
    v[k] = static_cast<int>(idx % static_cast<std::size_t>(card[k]));
    idx /= static_cast<std::size_t>(card[k]);
  }
  return v;
}

std::size_t encode(const std::vector<int>& values, const std::vector<int>& card) {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < card.size(); ++k)
    idx = idx * static_cast<std::size_t>(card[k]) + static_cast<std::size_t>(values[k]);
  return idx;
}

}  // namespace

int DiscreteBayesNet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<int> DiscreteBayesNet::features() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].role == Role::Feature) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> DiscreteBayesNet::specifications() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].role == Role::Specification) out.push_back(static_cast<int>(i));
  return out;
}

int DiscreteBayesNet::selection() const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].role == Role::Selection) return static_cast<int>(i);
  return -1;
}

bool DiscreteBayesNet::has_edge(int from, int to) const {
  const auto& ps = parents[static_cast<std::size_t>(to)];
  return std::find(ps.begin(), ps.end(), from) != ps.end();
}

std::size_t DiscreteBayesNet::state_space() const {
  std::size_t n = 1;
  for (const auto& v : vars) {
    n *= static_cast<std::size_t>(v.cardinality);
    if (n > kEnumerationBound) return n;
  }
  return n;
}

void DiscreteBayesNet::validate() const {
  const std::size_t n = vars.size();
  if (parents.size() != n || cpts.size() != n)
    throw ContractViolation("net: parents/cpts size does not match variables");
  int n_sel = 0;
  for (const auto& v : vars) {
    if (v.cardinality < 2)
      throw ContractViolation("net: variable '" + v.name + "' has cardinality < 2");
    if (v.role == Role::Selection) ++n_sel;
  }
  if (n_sel != 1) throw ContractViolation("net: exactly one selection variable required");

  // acyclicity (Kahn)
  std::vector<int> indeg(n, 0);
  for (std::size_t v = 0; v < n; ++v) indeg[v] = static_cast<int>(parents[v].size());
  std::vector<std::size_t> queue;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) queue.push_back(v);
  std::size_t seen = 0;
  while (!queue.empty()) {
    std::size_t u = queue.back();
    queue.pop_back();
    ++seen;
    for (std::size_t v = 0; v < n; ++v)
      if (has_edge(static_cast<int>(u), static_cast<int>(v)))
        if (--indeg[v] == 0) queue.push_back(v);
  }
  if (seen != n) throw ContractViolation("net: graph has a cycle");

  for (std::size_t v = 0; v < n; ++v) {
    if (!std::is_sorted(parents[v].begin(), parents[v].end()))
      throw ContractViolation("net: parent list of '" + vars[v].name + "' not sorted");
    std::size_t rows = 1;
    for (int p : parents[v]) rows *= static_cast<std::size_t>(vars[static_cast<std::size_t>(p)].cardinality);
    const auto own = static_cast<std::size_t>(vars[v].cardinality);
    if (cpts[v].size() != rows * own)
      throw ContractViolation("net: CPT of '" + vars[v].name + "' has wrong size");
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < own; ++k) {
        double pr = cpts[v][r * own + k];
        if (pr < 0.0) throw ContractViolation("net: negative probability in '" + vars[v].name + "'");
        s += pr;
      }
      if (std::fabs(s - 1.0) > 1e-12)
        throw ContractViolation("net: CPT row of '" + vars[v].name + "' does not sum to 1");
    }
  }
}

StructureReport check_structure(const DiscreteBayesNet& net) {
  StructureReport rep;
  const int sel = net.selection();
  for (std::size_t child = 0; child < net.vars.size(); ++child) {
    for (int p : net.parents[child]) {
      const Variable& pv = net.vars[static_cast<std::size_t>(p)];
      const Variable& cv = net.vars[child];
      if (pv.role == Role::Specification && cv.role == Role::Feature) {
        rep.no_spec_to_feature = false;
        rep.violations.push_back("(i) edge " + pv.name + " -> " + cv.name);
      }
      if (pv.role == Role::Specification && cv.role == Role::Specification) {
        rep.no_spec_to_spec = false;
        rep.violations.push_back("(ii) edge " + pv.name + " -> " + cv.name);
      }
      if (p == sel) {
        rep.selection_well_placed = false;
        rep.violations.push_back("(iii) selection has child " + cv.name);
      }
      if (static_cast<int>(child) == sel && pv.role != Role::Specification) {
        rep.selection_well_placed = false;
        rep.violations.push_back("(iii) selection has non-specification parent " + pv.name);
      }
    }
  }
  return rep;
}

double Factor::total() const {
  double s = 0.0;
  for (double v : table) s += v;
  return s;
}

Factor& Factor::normalize() {
  const double s = total();
  if (s <= 0.0) throw UndefinedConditional("factor: normalizing a zero-mass table");
  for (double& v : table) v /= s;
  return *this;
}

std::size_t Factor::index_of(const std::vector<int>& values) const {
  if (values.size() != scope.size())
    throw ContractViolation("factor: assignment length mismatch");
  return encode(values, card);
}

double Factor::max_abs_diff(const Factor& other) const {
  if (scope != other.scope || table.size() != other.table.size())
    throw ContractViolation("factor: comparing factors with different scopes");
  double m = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    m = std::max(m, std::fabs(table[i] - other.table[i]));
  return m;
}

Factor joint(const DiscreteBayesNet& net) {
  net.validate();
  const std::size_t total = net.state_space();
  if (total > kEnumerationBound)
    throw ContractViolation("joint: state space exceeds the 2^22 enumeration bound");

  Factor f;
  const std::size_t n = net.vars.size();
  f.scope.resize(n);
  f.card.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.scope[i] = static_cast<int>(i);
    f.card[i] = net.vars[i].cardinality;
  }
  f.table.assign(total, 0.0);

#pragma omp parallel for schedule(static)
  for (long long cell = 0; cell < static_cast<long long>(total); ++cell) {
    std::vector<int> values = decode(static_cast<std::size_t>(cell), f.card);
    double p = 1.0;
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t row = 0;
      for (int par : net.parents[v])
        row = row * static_cast<std::size_t>(net.vars[static_cast<std::size_t>(par)].cardinality) +
              static_cast<std::size_t>(values[static_cast<std::size_t>(par)]);
      const auto own = static_cast<std::size_t>(net.vars[v].cardinality);
      p *= net.cpts[v][row * own + static_cast<std::size_t>(values[v])];
    }
    f.table[static_cast<std::size_t>(cell)] = p;
  }
  return f;
}

Factor condition(const Factor& f, const std::vector<std::pair<int, int>>& assignment) {
  std::map<int, int> fixed;
  for (auto [var, val] : assignment) {
    auto it = std::find(f.scope.begin(), f.scope.end(), var);
    if (it == f.scope.end())
      throw ContractViolation("condition: variable not in factor scope");
    const int c = f.card[static_cast<std::size_t>(it - f.scope.begin())];
    if (val < 0 || val >= c) throw ContractViolation("condition: value out of range");
    fixed[var] = val;
  }
  Factor out;
  for (std::size_t k = 0; k < f.scope.size(); ++k) {
    if (!fixed.count(f.scope[k])) {
      out.scope.push_back(f.scope[k]);
      out.card.push_back(f.card[k]);
    }
  }
  std::size_t cells = 1;
  for (int c : out.card) cells *= static_cast<std::size_t>(c);
  out.table.assign(cells, 0.0);
  std::vector<int> src(f.scope.size());
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::vector<int> kept = decode(cell, out.card);
    std::size_t kpos = 0;
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
      auto it = fixed.find(f.scope[k]);
      src[k] = it != fixed.end() ? it->second : kept[kpos++];
    }
    out.table[cell] = f.table[encode(src, f.card)];
  }
  const double mass = out.total();
  if (mass <= 0.0)
    throw UndefinedConditional("condition: zero-mass conditioning event");
  for (double& v : out.table) v /= mass;
  return out;
}

Factor marginalize(const Factor& f, const std::vector<int>& keep) {
  std::vector<int> keep_sorted = keep;
  std::sort(keep_sorted.begin(), keep_sorted.end());
  Factor out;
  std::vector<std::size_t> keep_pos;
  for (int var : keep_sorted) {
    auto it = std::find(f.scope.begin(), f.scope.end(), var);
    if (it == f.scope.end())
      throw ContractViolation("marginalize: keep variable not in scope");
    keep_pos.push_back(static_cast<std::size_t>(it - f.scope.begin()));
    out.scope.push_back(var);
    out.card.push_back(f.card[static_cast<std::size_t>(it - f.scope.begin())]);
  }
  std::size_t cells = 1;
  for (int c : out.card) cells *= static_cast<std::size_t>(c);
  out.table.assign(cells, 0.0);
  std::vector<int> kept(out.scope.size());
  for (std::size_t cell = 0; cell < f.table.size(); ++cell) {
    std::vector<int> values = decode(cell, f.card);
    for (std::size_t k = 0; k < keep_pos.size(); ++k) kept[k] = values[keep_pos[k]];
    out.table[encode(kept, out.card)] += f.table[cell];
  }
  return out;
}

Factor product(const Factor& a, const Factor& b) {
  Factor out;
  std::set<int> scope_set(a.scope.begin(), a.scope.end());
  scope_set.insert(b.scope.begin(), b.scope.end());
  out.scope.assign(scope_set.begin(), scope_set.end());
  out.card.resize(out.scope.size());
  for (std::size_t k = 0; k < out.scope.size(); ++k) {
    auto ia = std::find(a.scope.begin(), a.scope.end(), out.scope[k]);
    auto ib = std::find(b.scope.begin(), b.scope.end(), out.scope[k]);
    int ca = ia != a.scope.end() ? a.card[static_cast<std::size_t>(ia - a.scope.begin())] : -1;
    int cb = ib != b.scope.end() ? b.card[static_cast<std::size_t>(ib - b.scope.begin())] : -1;
    if (ca > 0 && cb > 0 && ca != cb)
      throw ContractViolation("product: cardinality mismatch on shared variable");
    out.card[k] = ca > 0 ? ca : cb;
  }
  std::size_t cells = 1;
  for (int c : out.card) cells *= static_cast<std::size_t>(c);
  out.table.assign(cells, 0.0);

  auto positions = [&](const Factor& f) {
    std::vector<int> pos(out.scope.size(), -1);
    for (std::size_t k = 0; k < out.scope.size(); ++k) {
      auto it = std::find(f.scope.begin(), f.scope.end(), out.scope[k]);
      if (it != f.scope.end()) pos[k] = static_cast<int>(it - f.scope.begin());
    }
    return pos;
  };
  const std::vector<int> pa = positions(a), pb = positions(b);
  std::vector<int> va(a.scope.size()), vb(b.scope.size());
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::vector<int> values = decode(cell, out.card);
    for (std::size_t k = 0; k < out.scope.size(); ++k) {
      if (pa[k] >= 0) va[static_cast<std::size_t>(pa[k])] = values[k];
      if (pb[k] >= 0) vb[static_cast<std::size_t>(pb[k])] = values[k];
    }
    out.table[cell] = a.table[encode(va, a.card)] * b.table[encode(vb, b.card)];
  }
  return out;
}

Factor divide(const Factor& a, const Factor& b) {
  std::vector<int> bpos;
  for (int var : b.scope) {
    auto it = std::find(a.scope.begin(), a.scope.end(), var);
    if (it == a.scope.end())
      throw ContractViolation("divide: denominator scope must be within numerator scope");
    bpos.push_back(static_cast<int>(it - a.scope.begin()));
  }
  Factor out = a;
  std::vector<int> vb(b.scope.size());
  for (std::size_t cell = 0; cell < a.table.size(); ++cell) {
    std::vector<int> values = decode(cell, a.card);
    for (std::size_t k = 0; k < bpos.size(); ++k) vb[k] = values[static_cast<std::size_t>(bpos[k])];
    const double den = b.table[encode(vb, b.card)];
    if (den == 0.0) {
      if (a.table[cell] != 0.0)
        throw DivisionSingularity("divide: zero denominator with nonzero numerator");
      out.table[cell] = 0.0;
    } else {
      out.table[cell] = a.table[cell] / den;
    }
  }
  return out;
}

double event_mass(const Factor& f, const std::vector<std::pair<int, int>>& event) {
  std::vector<int> keep;
  for (auto [var, val] : event) keep.push_back(var);
  Factor m = marginalize(f, keep);
  std::vector<int> values(m.scope.size());
  for (auto [var, val] : event) {
    auto it = std::find(m.scope.begin(), m.scope.end(), var);
    values[static_cast<std::size_t>(it - m.scope.begin())] = val;
  }
  return m.table[m.index_of(values)];
}

std::string DiscreteBayesNet::to_json() const {
  nlohmann::json j;
  j["variables"] = nlohmann::json::array();
  for (const auto& v : vars)
    j["variables"].push_back({{"name", v.name},
                              {"role", role_name(v.role)},
                              {"cardinality", v.cardinality}});
  j["edges"] = nlohmann::json::array();
  for (std::size_t child = 0; child < vars.size(); ++child)
    for (int p : parents[child])
      j["edges"].push_back({vars[static_cast<std::size_t>(p)].name, vars[child].name});
  nlohmann::json cj = nlohmann::json::object();
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto own = static_cast<std::size_t>(vars[v].cardinality);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r * own < cpts[v].size(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t k = 0; k < own; ++k) row.push_back(cpts[v][r * own + k]);
      rows.push_back(row);
    }
    cj[vars[v].name] = rows;
  }
  j["cpts"] = cj;
  return j.dump(2);
}

DiscreteBayesNet DiscreteBayesNet::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("net description: ") + e.what());
  }
  DiscreteBayesNet net;
  for (const auto& v : j.at("variables"))
    net.vars.push_back({v.at("name").get<std::string>(),
                        role_from(v.at("role").get<std::string>()),
                        v.at("cardinality").get<int>()});
  net.parents.resize(net.vars.size());
  for (const auto& e : j.at("edges")) {
    int from = net.index_of(e.at(0).get<std::string>());
    int to = net.index_of(e.at(1).get<std::string>());
    if (from < 0 || to < 0) throw ContractViolation("net description: edge names unknown");
    net.parents[static_cast<std::size_t>(to)].push_back(from);
  }
  for (auto& ps : net.parents) std::sort(ps.begin(), ps.end());
  net.cpts.resize(net.vars.size());
  for (std::size_t v = 0; v < net.vars.size(); ++v) {
    const auto& rows = j.at("cpts").at(net.vars[v].name);
    for (const auto& row : rows)
      for (const auto& val : row) net.cpts[v].push_back(val.get<double>());
  }
  net.validate();
  return net;
}

}  // namespace exgen
