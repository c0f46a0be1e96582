#include "humor/baselines.hpp"

#include <stdexcept>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "humor/common.hpp"

namespace humor {

Partition kmeans_adjacency(const IntimacyMatrix& a, int k, std::uint64_t seed) {
    return assign(a.values, a.index_order, k, seed);
}

Partition normalized_cut(const IntimacyMatrix& a, int k, std::uint64_t seed) {
    const auto n = a.values.rows();
    if (k < 2 || k > n)
        throw std::invalid_argument("normalized cut needs 2 <= k <= n");

    Eigen::VectorXd degree = a.values.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i)
        if (degree(i) <= 0.0) degree(i) = 1e-12;  // isolated node
    const Eigen::VectorXd inv_sqrt = degree.cwiseSqrt().cwiseInverse();

    Eigen::MatrixXd lap = -a.values;
    lap += degree.asDiagonal();
    lap = inv_sqrt.asDiagonal() * lap * inv_sqrt.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
    if (eig.info() != Eigen::Success)
        throw NumericError("eigendecomposition of the normalized Laplacian failed", 0, 0.0);

    // eigenvalues come back ascending; the k flattest directions span the cuts
    const Eigen::MatrixXd embedding = eig.eigenvectors().leftCols(k);

    Partition p;
    p.k = k;
    p.index_order = a.index_order;
    Rng rng(seed);
    p.labels = kmeans_labels(embedding, k, rng, &p.warnings);
    return p;
}

Partition humor_single_source(const Dataset& ds, Scope which, const FusionConfig& cfg) {
    FusionConfig local = cfg;
    local.mode = which == Scope::esn ? FusionMode::esn_only : FusionMode::chart_only;
    local.check();

    const IntimacySet intimacies = compute_intimacies(ds.esn, ds.chart, true);
    const FusionProblem problem = FusionProblem::from(intimacies, ds.align);
    const FactorPair fp = solve(problem, local);

    Rng rng(local.seed);
    Partition p;
    p.k = local.k;
    if (which == Scope::esn) {
        p.index_order = problem.user_order;
        p.labels = kmeans_labels(fp.u, local.k, rng, &p.warnings);
    } else {
        p.index_order = problem.employee_order;
        p.labels = kmeans_labels(fp.v, local.k, rng, &p.warnings);
    }
    return p;
}

Partition extend_to_roster(const Partition& p, const std::vector<EmployeeId>& roster) {
    std::unordered_map<std::string, int> covered;
    covered.reserve(p.index_order.size());
    for (std::size_t i = 0; i < p.index_order.size(); ++i)
        covered[p.index_order[i]] = p.labels[i];

    Partition out;
    out.index_order = roster;
    out.warnings = p.warnings;
    bool grew = false;
    for (const auto& id : roster) {
        auto it = covered.find(id);
        if (it != covered.end()) {
            out.labels.push_back(it->second);
        } else {
            out.labels.push_back(p.k);  // sentinel community for the uncovered
            grew = true;
        }
    }
    out.k = grew ? p.k + 1 : p.k;
    if (grew)
        out.warnings.push_back("partition extended: uncovered employees assigned to community " +
                               std::to_string(p.k));
    return out;
}

} // namespace humor
