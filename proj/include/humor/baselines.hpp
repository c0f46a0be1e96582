#pragma once

#include <cstdint>

#include "humor/assignment.hpp"
#include "humor/dataset.hpp"
#include "humor/fusion.hpp"
#include "humor/intimacy.hpp"

namespace humor {

/// Rows of the adjacency matrix fed straight into the clustering recipe.
Partition kmeans_adjacency(const IntimacyMatrix& a, int k, std::uint64_t seed);

/// Spectral clustering: the k bottom eigenvectors of the symmetric
/// normalized Laplacian D^{-1/2} (D - A) D^{-1/2}, row-normalized, then the
/// standard k-means recipe. Isolated rows get degree 1e-12.
Partition normalized_cut(const IntimacyMatrix& a, int k, std::uint64_t seed);

/// Community detection from one source only: solve in esn_only or
/// chart_only mode over that source's three matrices, then cluster the
/// factor rows. The partition covers only that source's roster (the ESN
/// subset for the esn scope).
Partition humor_single_source(const Dataset& ds, Scope which, const FusionConfig& cfg);

/// Grow a partial partition onto a full roster: covered ids keep their
/// community, everyone else lands in one fresh sentinel community labeled
/// p.k (so k grows by one when anyone was missing).
Partition extend_to_roster(const Partition& p, const std::vector<EmployeeId>& roster);

} // namespace humor
