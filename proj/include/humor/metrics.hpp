#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "humor/assignment.hpp"
#include "humor/dataset.hpp"
#include "humor/intimacy.hpp"

namespace humor {

/// Intrinsic evaluation context: the mean-intimacy similarity between every
/// pair of employees, plus the observed relationship edges. For pairs where
/// one side has no ESN presence only the three company signals are averaged.
struct SimilarityOracle {
    Eigen::MatrixXd values;                     // |N| x |N|, symmetric, zero diagonal
    std::vector<std::pair<int, int>> edge_set;  // undirected (i < j), deduplicated:
                                                // mapped follow edges + management edges
    std::vector<EmployeeId> index_order;
};

SimilarityOracle build_similarity_oracle(const Dataset& ds, const IntimacySet& intimacies);
SimilarityOracle build_similarity_oracle(const Dataset& ds);  // computes normalized intimacies

/// Fraction of pairs co-clustered in both partitions or separated in both.
/// Rosters must contain the same ids (order free). Fewer than two elements
/// leaves no pairs to disagree: 1.0.
double rand_index(const Partition& p, const Partition& q);

/// Mutual information of the joint community-label distribution, natural log.
double mutual_information(const Partition& p, const Partition& q);

/// Mean over predicted communities of their largest overlap with any truth
/// class, as a fraction of n. inverse_purity swaps the roles.
double purity(const Partition& predicted, const Partition& truth);
double inverse_purity(const Partition& predicted, const Partition& truth);

/// Fraction of oracle edges whose endpoints share a community.
/// Throws on an empty edge set.
double density(const Partition& p, const SimilarityOracle& o);

/// Mean silhouette under d = 1 - similarity. Members of singleton
/// communities contribute 0. Throws unless at least two communities are
/// non-empty.
double silhouette(const Partition& p, const SimilarityOracle& o);

/// Davies-Bouldin index on the rows of (1 - similarity) as the embedding,
/// folded to 1/(1+DBI) so larger is better. Throws if k < 2 or any declared
/// community is empty. Coinciding centroids push the result to 0.
double normalized_dbi(const Partition& p, const SimilarityOracle& o);

/// Shannon entropy of the community size distribution, natural log.
double size_entropy(const Partition& p);

} // namespace humor
