#pragma once
#include <vector>

#include "exgen/bayes_net.hpp"
#include "exgen/rng.hpp"

namespace exgen {

// Partition of the specification variables into disjoint blocks, with the
// features shared across blocks listed separately (possibly empty).
struct SpecificationPartition {
  std::vector<std::vector<int>> blocks;
  std::vector<int> shared_features;
};

// Exact reconstruction of p(X | Z=1) from the selected-data distribution
// alone, valid when blocks share no features and cross-block features are
// non-adjacent. Output is a normalized factor over all features.
Factor identify_no_shared(const DiscreteBayesNet& net,
                          const SpecificationPartition& partition);

struct PositivePoint {
  std::vector<int> feature_ids;   // net variable indices, ascending
  std::vector<int> values;        // chosen value per feature
  double oracle_probability = 0;  // enumerated p(x | Z=1), verified > 0
};

// Constructs a feature assignment with positive enumerated probability under
// the novel combination, assembled from selected-data conditionals only.
PositivePoint construct_positive_point(const DiscreteBayesNet& net,
                                       const SpecificationPartition& partition);

// Approximate reconstruction of p(X | Z=1) from selected-data conditionals,
// exact when selection is absent. Accuracy is quantified by the caller
// against the enumeration oracle.
Factor conservative_identify(const DiscreteBayesNet& net,
                             const SpecificationPartition& partition);

struct WitnessResult {
  DiscreteBayesNet net_a;
  DiscreteBayesNet net_b;
  double tv_distance = 0.0;          // between the two novel conditionals
  double selected_agreement = 0.0;   // max-norm gap between selected joints
};

// Two structurally valid nets that agree on the selected-data joint but
// disagree on p(X | Z=1). Throws WitnessNotFound when the template pins the
// distribution (e.g. no selection) or the search budget is exhausted.
WitnessResult nonidentifiability_witness(const DiscreteBayesNet& tmpl);

// Helpers shared by the witness machinery and its tests.
Factor selected_joint(const DiscreteBayesNet& net);       // p(X,Z | S=1)
Factor novel_conditional(const DiscreteBayesNet& net);    // p(X | Z=1)
double total_variation(const Factor& a, const Factor& b);

// The two built-in topologies used throughout: four features in two
// non-overlapping parent pairs, and three features sharing the middle one.
DiscreteBayesNet make_disjoint_pair_net(Rng& rng);           // X1,X2->Z1  X3,X4->Z2
DiscreteBayesNet make_shared_feature_net(Rng& rng);          // X1,X2->Z1  X2,X3->Z2
// Same topology with selection leakage at most delta:
// P(S=0|z) <= delta for every z.
DiscreteBayesNet make_shared_feature_net_with_leakage(Rng& rng, double delta);

SpecificationPartition default_partition(const DiscreteBayesNet& net);

}  // namespace exgen
