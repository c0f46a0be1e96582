#include "humor/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace humor {

namespace {

// Reorder q's labels to follow p's roster. Throws when the id sets differ.
std::vector<int> labels_in_order(const Partition& q, const std::vector<EmployeeId>& order) {
    if (q.index_order.size() != order.size())
        throw ValidationError("roster-mismatch",
                              "partitions cover " + std::to_string(order.size()) + " vs " +
                                  std::to_string(q.index_order.size()) + " employees");
    std::unordered_map<std::string, int> label_of;
    label_of.reserve(q.index_order.size());
    for (std::size_t i = 0; i < q.index_order.size(); ++i)
        label_of[q.index_order[i]] = q.labels[i];
    std::vector<int> out;
    out.reserve(order.size());
    for (const auto& id : order) {
        auto it = label_of.find(id);
        if (it == label_of.end())
            throw ValidationError("roster-mismatch", "'" + id + "' missing from one partition");
        out.push_back(it->second);
    }
    return out;
}

// n_ij = |cluster i of p ∩ cluster j of q| over a shared roster
Eigen::MatrixXi contingency(const Partition& p, const Partition& q) {
    const std::vector<int> q_labels = labels_in_order(q, p.index_order);
    Eigen::MatrixXi table = Eigen::MatrixXi::Zero(p.k, q.k);
    for (std::size_t i = 0; i < p.labels.size(); ++i) ++table(p.labels[i], q_labels[i]);
    return table;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

std::vector<int> community_sizes(const Partition& p) {
    std::vector<int> sizes(p.k, 0);
    for (int l : p.labels) ++sizes[l];
    return sizes;
}

} // namespace

SimilarityOracle build_similarity_oracle(const Dataset& ds, const IntimacySet& intimacies) {
    const int n = static_cast<int>(ds.chart.employees.size());
    SimilarityOracle o;
    o.index_order = ds.chart.ids();
    o.values = Eigen::MatrixXd::Zero(n, n);

    // employee -> ESN user, -1 when absent from the network
    std::vector<int> user_of(n, -1);
    for (std::size_t u = 0; u < ds.align.user_to_employee.size(); ++u)
        if (ds.align.user_to_employee[u] >= 0)
            user_of[ds.align.user_to_employee[u]] = static_cast<int>(u);

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double sum = 0.0;
            int sources = 0;
            for (const auto& m : intimacies.chart) {
                sum += m.values(i, j);
                ++sources;
            }
            if (user_of[i] >= 0 && user_of[j] >= 0) {
                for (const auto& m : intimacies.esn) {
                    sum += m.values(user_of[i], user_of[j]);
                    ++sources;
                }
            }
            o.values(i, j) = o.values(j, i) = sum / sources;
        }
    }

    std::set<std::pair<int, int>> edges;
    const auto uidx = ds.esn.user_index();
    const auto eidx = ds.chart.id_index();
    for (const auto& [src, dst] : ds.esn.follows) {
        const int a = ds.align.user_to_employee[uidx.at(src)];
        const int b = ds.align.user_to_employee[uidx.at(dst)];
        if (a >= 0 && b >= 0 && a != b) edges.emplace(std::min(a, b), std::max(a, b));
    }
    for (const auto& e : ds.chart.employees) {
        if (!e.manager) continue;
        const int a = eidx.at(e.id);
        const int b = eidx.at(*e.manager);
        edges.emplace(std::min(a, b), std::max(a, b));
    }
    o.edge_set.assign(edges.begin(), edges.end());
    return o;
}

SimilarityOracle build_similarity_oracle(const Dataset& ds) {
    return build_similarity_oracle(ds, compute_intimacies(ds.esn, ds.chart, true));
}

double rand_index(const Partition& p, const Partition& q) {
    const double n = static_cast<double>(p.labels.size());
    if (n < 2.0) {
        labels_in_order(q, p.index_order);  // still enforce the roster contract
        return 1.0;
    }
    const Eigen::MatrixXi table = contingency(p, q);
    double cells = 0.0;
    for (int i = 0; i < table.rows(); ++i)
        for (int j = 0; j < table.cols(); ++j) cells += choose2(table(i, j));
    double rows = 0.0, cols = 0.0;
    for (int i = 0; i < table.rows(); ++i) rows += choose2(table.row(i).sum());
    for (int j = 0; j < table.cols(); ++j) cols += choose2(table.col(j).sum());
    // pairs agreeing in both = total - (split in one but not the other)
    return (choose2(n) + 2.0 * cells - rows - cols) / choose2(n);
}

double mutual_information(const Partition& p, const Partition& q) {
    const double n = static_cast<double>(p.labels.size());
    if (n == 0.0) throw ValidationError("mutual information of an empty roster");
    const Eigen::MatrixXi table = contingency(p, q);
    double mi = 0.0;
    for (int i = 0; i < table.rows(); ++i) {
        const double pi = table.row(i).sum() / n;
        if (pi == 0.0) continue;
        for (int j = 0; j < table.cols(); ++j) {
            const double pij = table(i, j) / n;
            if (pij == 0.0) continue;
            const double pj = table.col(j).sum() / n;
            mi += pij * std::log(pij / (pi * pj));
        }
    }
    return mi;
}

double purity(const Partition& predicted, const Partition& truth) {
    const double n = static_cast<double>(predicted.labels.size());
    if (n == 0.0) throw ValidationError("purity of an empty roster");
    const Eigen::MatrixXi table = contingency(predicted, truth);
    double hits = 0.0;
    for (int i = 0; i < table.rows(); ++i) hits += table.row(i).maxCoeff();
    return hits / n;
}

double inverse_purity(const Partition& predicted, const Partition& truth) {
    return purity(truth, predicted);
}

double density(const Partition& p, const SimilarityOracle& o) {
    if (o.edge_set.empty())
        throw ValidationError("empty-edge-set", "density needs at least one edge");
    const std::vector<int> labels = labels_in_order(p, o.index_order);
    int kept = 0;
    for (const auto& [a, b] : o.edge_set) kept += labels[a] == labels[b];
    return static_cast<double>(kept) / static_cast<double>(o.edge_set.size());
}

double silhouette(const Partition& p, const SimilarityOracle& o) {
    const std::vector<int> labels = labels_in_order(p, o.index_order);
    const int n = static_cast<int>(labels.size());
    std::vector<int> sizes(p.k, 0);
    for (int l : labels) ++sizes[l];
    if (std::count_if(sizes.begin(), sizes.end(), [](int s) { return s > 0; }) < 2)
        throw ValidationError("degenerate-partition",
                              "silhouette needs at least two non-empty communities");

    auto dist = [&](int i, int j) { return 1.0 - o.values(i, j); };

    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (sizes[labels[i]] == 1) continue;  // singleton: contributes 0
        std::vector<double> mean_to(p.k, 0.0);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_to[labels[j]] += dist(i, j);
        }
        double a = 0.0, b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < p.k; ++c) {
            if (c == labels[i]) {
                a = mean_to[c] / (sizes[c] - 1);
            } else if (sizes[c] > 0) {
                b = std::min(b, mean_to[c] / sizes[c]);
            }
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / n;
}

double normalized_dbi(const Partition& p, const SimilarityOracle& o) {
    if (p.k < 2)
        throw ValidationError("degenerate-partition", "DBI needs at least two communities");
    const std::vector<int> labels = labels_in_order(p, o.index_order);
    const int n = static_cast<int>(labels.size());
    std::vector<int> sizes(p.k, 0);
    for (int l : labels) ++sizes[l];
    for (int c = 0; c < p.k; ++c)
        if (sizes[c] == 0)
            throw ValidationError("empty-community",
                                  "community " + std::to_string(c) + " has no members");

    // embedding: row i of the pairwise-distance matrix, self-distance kept at 1
    Eigen::MatrixXd embed = Eigen::MatrixXd::Ones(n, n) - o.values;

    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(p.k, n);
    for (int i = 0; i < n; ++i) centroids.row(labels[i]) += embed.row(i);
    for (int c = 0; c < p.k; ++c) centroids.row(c) /= sizes[c];

    std::vector<double> scatter(p.k, 0.0);
    for (int i = 0; i < n; ++i)
        scatter[labels[i]] += (embed.row(i) - centroids.row(labels[i])).norm();
    for (int c = 0; c < p.k; ++c) scatter[c] /= sizes[c];

    double dbi = 0.0;
    for (int c = 0; c < p.k; ++c) {
        double worst = 0.0;
        for (int d = 0; d < p.k; ++d) {
            if (d == c) continue;
            const double sep = (centroids.row(c) - centroids.row(d)).norm();
            // coinciding centroids make the pair inseparable
            const double ratio = sep > 0.0 ? (scatter[c] + scatter[d]) / sep
                                           : std::numeric_limits<double>::infinity();
            worst = std::max(worst, ratio);
        }
        dbi += worst;
    }
    dbi /= p.k;
    return std::isinf(dbi) ? 0.0 : 1.0 / (1.0 + dbi);
}

double size_entropy(const Partition& p) {
    const double n = static_cast<double>(p.labels.size());
    if (n == 0.0) throw ValidationError("entropy of an empty roster");
    double h = 0.0;
    for (int size : community_sizes(p)) {
        if (size == 0) continue;
        const double frac = size / n;
        h -= frac * std::log(frac);
    }
    return h;
}

} // namespace humor
