#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "humor/common.hpp"
#include "humor/dataset.hpp"

namespace humor {

/// A hard community assignment over a fixed roster. labels[i] is the
/// community of index_order[i], always in [0, k).
struct Partition {
    int k = 0;
    std::vector<int> labels;
    std::vector<EmployeeId> index_order;
    std::vector<std::string> warnings;  // degeneracies worth surfacing, not errors
};

/// k-means on the rows of `points`: L2 row normalization (zero rows are kept
/// as-is), k-means++ seeding, 100 restarts of Lloyd capped at 200 sweeps,
/// distance ties broken toward the lowest centroid index, best restart by
/// inertia (ties toward the earlier restart). All randomness from `rng`.
/// If every normalized row is identical the labels are all zero and a note
/// is appended to *warnings.
std::vector<int> kmeans_labels(const Eigen::MatrixXd& points, int k, Rng& rng,
                               std::vector<std::string>* warnings = nullptr);

/// Cluster the rows of a factor matrix into k communities.
Partition assign(const Eigen::MatrixXd& factor, const std::vector<EmployeeId>& order, int k,
                 std::uint64_t seed);

/// Take each row's strongest column as its community; k = column count.
/// Ties go to the lowest column index.
Partition argmax_assign(const Eigen::MatrixXd& factor, const std::vector<EmployeeId>& order);

/// {"k": ..., "labels": {id: community, ...}}
std::string partition_to_json(const Partition& p);
Partition parse_partition_json(const std::string& text);
Partition load_partition(const std::string& path);
void save_partition(const Partition& p, const std::string& path);

} // namespace humor
