#include "humor/assignment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace humor {

namespace {

constexpr int kRestarts = 100;
constexpr int kMaxSweeps = 200;

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& points) {
    Eigen::MatrixXd out = points;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double norm = out.row(i).norm();
        if (norm > 0.0) out.row(i) /= norm;
    }
    return out;
}

// squared Euclidean distance between row i and centroid row c
double sq_dist(const Eigen::MatrixXd& rows, Eigen::Index i, const Eigen::MatrixXd& centroids,
               Eigen::Index c) {
    return (rows.row(i) - centroids.row(c)).squaredNorm();
}

Eigen::MatrixXd seed_centroids(const Eigen::MatrixXd& rows, int k, Rng& rng) {
    const auto n = rows.rows();
    Eigen::MatrixXd centroids(k, rows.cols());
    centroids.row(0) = rows.row(static_cast<Eigen::Index>(rng.below(n)));

    std::vector<double> dist(n);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = sq_dist(rows, i, centroids, 0);
            for (int prev = 1; prev < c; ++prev)
                best = std::min(best, sq_dist(rows, i, centroids, prev));
            dist[i] = best;
            total += best;
        }
        Eigen::Index pick;
        if (total > 0.0) {
            // D^2 sampling: walk the cumulative weights
            const double r = rng.uniform() * total;
            double cum = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                cum += dist[i];
                if (r < cum) {
                    pick = i;
                    break;
                }
            }
        } else {
            // every point already coincides with a chosen centroid
            pick = static_cast<Eigen::Index>(rng.below(n));
        }
        centroids.row(c) = rows.row(pick);
    }
    return centroids;
}

// one full Lloyd run; returns labels and writes the final inertia
std::vector<int> lloyd(const Eigen::MatrixXd& rows, int k, Rng& rng, double& inertia) {
    const auto n = rows.rows();
    Eigen::MatrixXd centroids = seed_centroids(rows, k, rng);
    std::vector<int> labels(n, 0);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool moved = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(rows, i, centroids, 0);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(rows, i, centroids, c);
                if (d < best_d) {  // strict: ties stay at the lower index
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                moved = true;
            }
        }
        if (!moved && sweep > 0) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
        std::vector<int> counts(k, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(labels[i]) += rows.row(i);
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) centroids.row(c) = sums.row(c) / counts[c];
        // empty clusters keep their previous centroid
    }

    inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) inertia += sq_dist(rows, i, centroids, labels[i]);
    return labels;
}

} // namespace

std::vector<int> kmeans_labels(const Eigen::MatrixXd& points, int k, Rng& rng,
                               std::vector<std::string>* warnings) {
    const auto n = points.rows();
    if (n == 0) throw std::invalid_argument("no rows to cluster");
    if (k < 1 || k > n)
        throw std::invalid_argument("k must be between 1 and the row count (" +
                                    std::to_string(n) + "), got " + std::to_string(k));

    const Eigen::MatrixXd rows = normalize_rows(points);

    bool all_same = true;
    for (Eigen::Index i = 1; i < n && all_same; ++i)
        all_same = (rows.row(i).array() == rows.row(0).array()).all();
    if (all_same) {
        if (warnings)
            warnings->push_back("all rows identical after normalization; "
                                "every point assigned to community 0");
        return std::vector<int>(n, 0);
    }

    std::vector<int> best_labels;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < kRestarts; ++restart) {
        double inertia = 0.0;
        std::vector<int> labels = lloyd(rows, k, rng, inertia);
        if (inertia < best_inertia) {  // strict: ties keep the earlier restart
            best_inertia = inertia;
            best_labels = std::move(labels);
        }
    }
    return best_labels;
}

Partition assign(const Eigen::MatrixXd& factor, const std::vector<EmployeeId>& order, int k,
                 std::uint64_t seed) {
    if (static_cast<Eigen::Index>(order.size()) != factor.rows())
        throw std::invalid_argument("factor has " + std::to_string(factor.rows()) +
                                    " rows but the roster has " + std::to_string(order.size()));
    Partition p;
    p.k = k;
    p.index_order = order;
    Rng rng(seed);
    p.labels = kmeans_labels(factor, k, rng, &p.warnings);
    return p;
}

Partition argmax_assign(const Eigen::MatrixXd& factor, const std::vector<EmployeeId>& order) {
    if (static_cast<Eigen::Index>(order.size()) != factor.rows())
        throw std::invalid_argument("factor has " + std::to_string(factor.rows()) +
                                    " rows but the roster has " + std::to_string(order.size()));
    if (factor.cols() < 1) throw std::invalid_argument("factor has no columns");
    Partition p;
    p.k = static_cast<int>(factor.cols());
    p.index_order = order;
    p.labels.resize(factor.rows());
    for (Eigen::Index i = 0; i < factor.rows(); ++i) {
        Eigen::Index best = 0;
        factor.row(i).maxCoeff(&best);  // Eigen returns the first maximum
        p.labels[i] = static_cast<int>(best);
    }
    return p;
}

std::string partition_to_json(const Partition& p) {
    nlohmann::json out;
    out["k"] = p.k;
    out["labels"] = nlohmann::json::object();
    for (std::size_t i = 0; i < p.index_order.size(); ++i)
        out["labels"][p.index_order[i]] = p.labels[i];
    return out.dump(2) + "\n";
}

Partition parse_partition_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("partition file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("k") || !j.contains("labels"))
        throw ParseError("partition file must be an object with 'k' and 'labels'");
    if (!j["k"].is_number_integer()) throw ParseError("'k' must be an integer");
    if (!j["labels"].is_object()) throw ParseError("'labels' must map ids to communities");

    Partition p;
    p.k = j["k"].get<int>();
    if (p.k < 1) throw ValidationError("partition has k=" + std::to_string(p.k));
    for (const auto& [id, label] : j["labels"].items()) {
        if (!label.is_number_integer())
            throw ParseError("label for '" + id + "' must be an integer");
        const int l = label.get<int>();
        if (l < 0 || l >= p.k)
            throw ValidationError("label-range", "'" + id + "' has label " + std::to_string(l) +
                                                     ", outside [0, " + std::to_string(p.k) + ")");
        p.index_order.push_back(id);
        p.labels.push_back(l);
    }
    return p;
}

Partition load_partition(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_partition_json(text);
}

void save_partition(const Partition& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << partition_to_json(p);
}

} // namespace humor
