#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "humor/common.hpp"

namespace humor {

using EmployeeId = std::string;

enum class PostKind { write, comment, like };

const char* to_string(PostKind k);
PostKind post_kind_from_string(const std::string& s);

/// Online enterprise social network: users, interest groups, posts, and the
/// typed edges between them. Treated as immutable once built.
struct EsnGraph {
    struct PostLink {
        EmployeeId user;
        std::string post;
        PostKind kind;
    };

    std::vector<EmployeeId> users;   // index order for all user-scoped matrices
    std::vector<std::string> groups;
    std::vector<std::string> posts;
    std::vector<std::pair<EmployeeId, EmployeeId>> follows;       // directed (src, dst)
    std::vector<std::pair<EmployeeId, std::string>> memberships;  // (user, group)
    std::vector<PostLink> post_links;

    std::unordered_map<std::string, int> user_index() const;
    std::unordered_map<std::string, int> group_index() const;
    std::unordered_map<std::string, int> post_index() const;
};

/// A job title split into its lowercase word tokens plus the root term that
/// names the actual role ("Senior SDE" and "SDE" share the root "sde").
struct JobTitle {
    std::string raw;
    std::vector<std::string> tokens;  // sorted, unique, lowercase
    std::string root_term;
};

/// Tokenize, strip seniority prefixes, and pick the root term (last token
/// that is not a seniority word; falls back to the last token).
JobTitle make_job_title(const std::string& raw, const std::vector<std::string>& seniority_stopwords);

const std::vector<std::string>& default_seniority_stopwords();

struct Workplace {
    std::string country;
    std::string time_zone;
};

/// Management tree plus per-employee job-title and workplace attributes.
/// Stored exactly as declared in the input file; tree invariants are checked
/// by validate(), not by construction, so malformed charts can be inspected.
struct OrgChart {
    struct Employee {
        EmployeeId id;
        std::optional<EmployeeId> manager;  // nullopt only for the root
        JobTitle title;
        Workplace workplace;
    };

    std::vector<Employee> employees;  // file order = index order
    EmployeeId root;
    std::vector<std::string> seniority_stopwords;  // effective list
    bool custom_stopwords = false;                 // file carried its own list

    std::vector<EmployeeId> ids() const;
    std::unordered_map<std::string, int> id_index() const;

    /// Parent index per employee, -1 for the root. Requires a valid tree.
    std::vector<int> parents() const;
};

/// Maps each ESN user onto their company employee record. Row i of the
/// binary transition matrix selects employee user_to_employee[i].
struct AlignmentMap {
    std::vector<int> user_to_employee;  // chart index per ESN user, -1 if unmatched

    Eigen::MatrixXd to_matrix(int n_employees) const;
};

std::vector<Violation> validate(const EsnGraph& graph, const OrgChart& chart,
                                const AlignmentMap& align);

/// Alignment by EmployeeId equality: ESN users sharing an id with a chart
/// employee are the same person. Unmatched users map to -1.
AlignmentMap derive_alignment(const EsnGraph& graph, const OrgChart& chart);

struct Dataset {
    EsnGraph esn;
    OrgChart chart;
    AlignmentMap align;
};

EsnGraph parse_esn_json(const std::string& text);
OrgChart parse_chart_json(const std::string& text);

/// Load, align, and validate both sources. Throws ParseError on malformed
/// files and ValidationError (naming the offending record) on invariant
/// breaches.
Dataset load_dataset(const std::string& esn_path, const std::string& chart_path);

std::string esn_to_json(const EsnGraph& graph);
std::string chart_to_json(const OrgChart& chart);
void save_esn(const EsnGraph& graph, const std::string& path);
void save_chart(const OrgChart& chart, const std::string& path);

} // namespace humor
