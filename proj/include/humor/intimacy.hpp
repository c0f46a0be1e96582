#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "humor/dataset.hpp"

namespace humor {

enum class Source { social, group, post, chart, title, workplace };
enum class Scope { esn, company };

const char* to_string(Source s);
Source source_from_string(const std::string& s);

/// Symmetric nonnegative employee-by-employee score matrix for one signal.
struct IntimacyMatrix {
    Source source;
    Scope scope;
    Eigen::MatrixXd values;
    std::vector<EmployeeId> index_order;

    int size() const { return static_cast<int>(values.rows()); }

    /// Empty iff symmetric (exact), nonnegative, zero diagonal, finite.
    std::vector<std::string> check_invariants() const;
};

// ESN kernels, |U| x |U|
IntimacyMatrix social_intimacy(const EsnGraph& graph);
IntimacyMatrix group_intimacy(const EsnGraph& graph);
IntimacyMatrix post_intimacy(const EsnGraph& graph);

// company kernels, |N| x |N|
IntimacyMatrix chart_intimacy(const OrgChart& chart);
IntimacyMatrix title_intimacy(const OrgChart& chart);
IntimacyMatrix workplace_intimacy(const OrgChart& chart);

/// Divide by the matrix maximum so the top score is 1; all-zero input is
/// returned unchanged. Idempotent.
IntimacyMatrix normalize(const IntimacyMatrix& m);

/// All six kernels for a validated dataset, normalized by default.
struct IntimacySet {
    std::vector<IntimacyMatrix> esn;    // social, group, post
    std::vector<IntimacyMatrix> chart;  // chart, title, workplace
};
IntimacySet compute_intimacies(const EsnGraph& graph, const OrgChart& chart,
                               bool normalized = true);

/// Debug/golden dump: {"source":..., "ids":[...], "rows":[[...], ...]}.
std::string matrix_to_json(const IntimacyMatrix& m);

} // namespace humor
