#pragma once
#include <string>
#include <vector>

#include "exgen/rng.hpp"

namespace exgen {

enum class Role { Feature, Specification, Selection };

struct Variable {
  std::string name;
  Role role = Role::Feature;
  int cardinality = 2;
};

// Discrete Bayesian network over features X, specifications Z and a single
// binary-role selection variable S. Parents are kept sorted by variable id;
// CPT rows are indexed by parent assignments in lexicographic order with the
// first parent slowest, one probability per own value within a row.
struct DiscreteBayesNet {
  std::vector<Variable> vars;
  std::vector<std::vector<int>> parents;
  std::vector<std::vector<double>> cpts;

  int index_of(const std::string& name) const;  // -1 if absent
  std::vector<int> features() const;
  std::vector<int> specifications() const;
  int selection() const;  // -1 if absent

  bool has_edge(int from, int to) const;
  std::size_t state_space() const;

  // Throws ContractViolation on malformed nets: cycles, bad row sums,
  // negative probabilities, missing/duplicated selection variable.
  void validate() const;

  std::string to_json() const;
  static DiscreteBayesNet from_json(const std::string& text);
};

// Per-assumption structural verdicts: (i) no Z->X edges, (ii) no Z-Z edges,
// (iii) S childless with parents among Z only.
struct StructureReport {
  bool no_spec_to_feature = true;
  bool no_spec_to_spec = true;
  bool selection_well_placed = true;
  std::vector<std::string> violations;

  bool pass() const {
    return no_spec_to_feature && no_spec_to_spec && selection_well_placed;
  }
};

StructureReport check_structure(const DiscreteBayesNet& net);

// Dense factor over a sorted subset of the net's variables; the last scope
// variable varies fastest.
struct Factor {
  std::vector<int> scope;
  std::vector<int> card;
  std::vector<double> table;

  double total() const;
  Factor& normalize();  // throws UndefinedConditional when total is zero
  std::size_t index_of(const std::vector<int>& values) const;  // values per scope var
  double max_abs_diff(const Factor& other) const;
};

// Brute-force enumeration of the full joint; the desk-scale oracle.
// Rejects nets whose state space exceeds 2^22 entries.
Factor joint(const DiscreteBayesNet& net);

// Slices on var=value pairs, drops those variables and renormalizes.
Factor condition(const Factor& f, const std::vector<std::pair<int, int>>& assignment);

// Sums out everything not in keep (keep must be a subset of the scope).
Factor marginalize(const Factor& f, const std::vector<int>& keep);

Factor product(const Factor& a, const Factor& b);

// Cellwise a/b with b's scope a subset of a's. 0/0 is 0; x/0 throws.
Factor divide(const Factor& a, const Factor& b);

// Probability of an event under a factor (variables must be in scope).
double event_mass(const Factor& f, const std::vector<std::pair<int, int>>& event);

}  // namespace exgen
