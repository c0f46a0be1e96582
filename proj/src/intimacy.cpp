#include "humor/intimacy.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace humor {

const char* to_string(Source s) {
    switch (s) {
        case Source::social: return "social";
        case Source::group: return "group";
        case Source::post: return "post";
        case Source::chart: return "chart";
        case Source::title: return "title";
        case Source::workplace: return "workplace";
    }
    return "?";
}

Source source_from_string(const std::string& s) {
    for (Source src : {Source::social, Source::group, Source::post, Source::chart,
                       Source::title, Source::workplace})
        if (s == to_string(src)) return src;
    throw ParseError("unknown intimacy source \"" + s + "\"");
}

std::vector<std::string> IntimacyMatrix::check_invariants() const {
    std::vector<std::string> out;
    const int n = size();
    if (values.cols() != n) {
        out.push_back("matrix is not square");
        return out;
    }
    if (static_cast<int>(index_order.size()) != n)
        out.push_back("index_order length does not match matrix size");
    for (int i = 0; i < n; ++i) {
        if (values(i, i) != 0.0) out.push_back("nonzero diagonal at " + std::to_string(i));
        for (int j = 0; j < n; ++j) {
            const double v = values(i, j);
            if (!std::isfinite(v)) out.push_back("non-finite entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            if (v < 0.0) out.push_back("negative entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            if (j > i && v != values(j, i))
                out.push_back("asymmetry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
        if (out.size() > 16) {  // enough to diagnose
            out.push_back("...");
            return out;
        }
    }
    return out;
}

namespace {

IntimacyMatrix zeros(Source source, Scope scope, std::vector<EmployeeId> ids) {
    IntimacyMatrix m;
    m.source = source;
    m.scope = scope;
    m.index_order = std::move(ids);
    const int n = static_cast<int>(m.index_order.size());
    m.values = Eigen::MatrixXd::Zero(n, n);
    return m;
}

// sorted-vector set intersection size
int intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
    int count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else { ++count; ++ia; ++ib; }
    }
    return count;
}

std::vector<std::vector<int>> sorted_unique(std::vector<std::vector<int>> sets) {
    for (auto& s : sets) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return sets;
}

} // namespace

IntimacyMatrix social_intimacy(const EsnGraph& graph) {
    auto m = zeros(Source::social, Scope::esn, graph.users);
    const int n = m.size();
    if (n == 0) return m;

    const auto idx = graph.user_index();
    std::vector<std::vector<int>> nbr(n);
    for (const auto& [src, dst] : graph.follows) {
        const int a = idx.at(src);
        const int b = idx.at(dst);
        nbr[a].push_back(b);  // direction discarded
        nbr[b].push_back(a);
    }
    nbr = sorted_unique(std::move(nbr));

    const double total = static_cast<double>(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int shared = intersection_size(nbr[i], nbr[j]);
            if (shared == 0) continue;
            const double p_joint = shared / total;
            const double p_i = nbr[i].size() / total;
            const double p_j = nbr[j].size() / total;
            const double pmi = p_joint * std::log(p_joint / (p_i * p_j));
            const double v = std::max(pmi, 0.0);
            m.values(i, j) = v;
            m.values(j, i) = v;
        }
    }
    return m;
}

IntimacyMatrix group_intimacy(const EsnGraph& graph) {
    auto m = zeros(Source::group, Scope::esn, graph.users);
    const int n = m.size();
    if (n == 0) return m;

    const auto uidx = graph.user_index();
    const auto gidx = graph.group_index();
    std::vector<std::vector<int>> members(graph.groups.size());
    for (const auto& [user, group] : graph.memberships)
        members[gidx.at(group)].push_back(uidx.at(user));

    // accumulate each group's inverse-membership weight over its member pairs
    const double total = static_cast<double>(n);
    for (auto& mem : members) {
        std::sort(mem.begin(), mem.end());
        if (mem.empty()) continue;  // contributes to no pair
        const double imf = std::log(total / static_cast<double>(mem.size()));
        for (std::size_t a = 0; a < mem.size(); ++a)
            for (std::size_t b = a + 1; b < mem.size(); ++b) {
                m.values(mem[a], mem[b]) += imf;
                m.values(mem[b], mem[a]) += imf;
            }
    }
    return m;
}

IntimacyMatrix post_intimacy(const EsnGraph& graph) {
    auto m = zeros(Source::post, Scope::esn, graph.users);
    const int n = m.size();
    if (n == 0) return m;

    const auto uidx = graph.user_index();
    const auto pidx = graph.post_index();
    std::vector<std::vector<int>> correlated(n);  // write/comment/like pooled
    for (const auto& link : graph.post_links)
        correlated[uidx.at(link.user)].push_back(pidx.at(link.post));
    correlated = sorted_unique(std::move(correlated));

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int shared = intersection_size(correlated[i], correlated[j]);
            const std::size_t uni = correlated[i].size() + correlated[j].size() - shared;
            if (uni == 0) continue;
            const double v = static_cast<double>(shared) / static_cast<double>(uni);
            m.values(i, j) = v;
            m.values(j, i) = v;
        }
    }
    return m;
}

IntimacyMatrix chart_intimacy(const OrgChart& chart) {
    auto m = zeros(Source::chart, Scope::company, chart.ids());
    const int n = m.size();
    if (n == 0) return m;

    const auto parent = chart.parents();
    std::vector<int> depth(n, 0);
    for (int i = 0; i < n; ++i) {
        int d = 0;
        for (int cur = i; parent[cur] != -1; cur = parent[cur]) ++d;
        depth[i] = d;
    }

    // tree distance via lowest common ancestor; walk the deeper node up
    auto steps = [&](int a, int b) {
        int d = 0;
        while (depth[a] > depth[b]) { a = parent[a]; ++d; }
        while (depth[b] > depth[a]) { b = parent[b]; ++d; }
        while (a != b) { a = parent[a]; b = parent[b]; d += 2; }
        return d;
    };

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 1.0 / static_cast<double>(steps(i, j));
            m.values(i, j) = v;
            m.values(j, i) = v;
        }
    return m;
}

IntimacyMatrix title_intimacy(const OrgChart& chart) {
    auto m = zeros(Source::title, Scope::company, chart.ids());
    const int n = m.size();
    for (int i = 0; i < n; ++i) {
        const auto& ti = chart.employees[i].title;
        for (int j = i + 1; j < n; ++j) {
            const auto& tj = chart.employees[j].title;
            if (ti.root_term != tj.root_term || ti.root_term.empty()) continue;
            std::vector<std::string> shared;
            std::set_intersection(ti.tokens.begin(), ti.tokens.end(), tj.tokens.begin(),
                                  tj.tokens.end(), std::back_inserter(shared));
            const std::size_t uni = ti.tokens.size() + tj.tokens.size() - shared.size();
            if (uni == 0) continue;
            const double v = static_cast<double>(shared.size()) / static_cast<double>(uni);
            m.values(i, j) = v;
            m.values(j, i) = v;
        }
    }
    return m;
}

IntimacyMatrix workplace_intimacy(const OrgChart& chart) {
    auto m = zeros(Source::workplace, Scope::company, chart.ids());
    const int n = m.size();
    for (int i = 0; i < n; ++i) {
        const auto& wi = chart.employees[i].workplace;
        for (int j = i + 1; j < n; ++j) {
            const auto& wj = chart.employees[j].workplace;
            const double v = 0.5 * ((wi.country == wj.country ? 1.0 : 0.0) +
                                    (wi.time_zone == wj.time_zone ? 1.0 : 0.0));
            m.values(i, j) = v;
            m.values(j, i) = v;
        }
    }
    return m;
}

IntimacyMatrix normalize(const IntimacyMatrix& m) {
    const double top = m.values.size() == 0 ? 0.0 : m.values.maxCoeff();
    if (top <= 0.0) return m;
    IntimacyMatrix out = m;
    out.values /= top;
    return out;
}

IntimacySet compute_intimacies(const EsnGraph& graph, const OrgChart& chart, bool normalized) {
    IntimacySet set;
    set.esn = {social_intimacy(graph), group_intimacy(graph), post_intimacy(graph)};
    set.chart = {chart_intimacy(chart), title_intimacy(chart), workplace_intimacy(chart)};
    if (normalized) {
        for (auto& m : set.esn) m = normalize(m);
        for (auto& m : set.chart) m = normalize(m);
    }
    return set;
}

std::string matrix_to_json(const IntimacyMatrix& m) {
    nlohmann::json j;
    j["source"] = to_string(m.source);
    j["ids"] = m.index_order;
    j["rows"] = nlohmann::json::array();
    for (int i = 0; i < m.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < m.size(); ++c) row.push_back(m.values(i, c));
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

} // namespace humor
