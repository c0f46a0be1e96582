#include <string>
#include <vector>

#include <doctest.h>

#include "humor/baselines.hpp"
#include "humor/metrics.hpp"
#include "humor/synth.hpp"

using namespace humor;

namespace {

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    return true;
}

/// Block-diagonal similarity: three groups of four with no cross edges.
IntimacyMatrix disconnected_blocks() {
    const int n = 12;
    IntimacyMatrix m;
    m.source = Source::social;
    m.scope = Scope::esn;
    m.values = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m.index_order.push_back("e" + std::to_string(i));
        for (int j = 0; j < n; ++j)
            if (i != j && i / 4 == j / 4) m.values(i, j) = 0.8;
    }
    return m;
}

const std::vector<int> kBlockTruth{0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2};

Dataset as_dataset(const SynthDataset& ds) {
    Dataset out;
    out.esn = ds.esn;
    out.chart = ds.chart;
    out.align = ds.align;
    return out;
}

} // namespace

TEST_CASE("normalized cut separates disconnected components exactly") {
    const IntimacyMatrix m = disconnected_blocks();
    const Partition p = normalized_cut(m, 3, 1);
    CHECK(p.k == 3);
    CHECK(p.index_order == m.index_order);
    CHECK(same_partition(p.labels, kBlockTruth));

    // same seed, same labels
    CHECK(normalized_cut(m, 3, 1).labels == p.labels);

    CHECK_THROWS_AS(normalized_cut(m, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(normalized_cut(m, 13, 0), std::invalid_argument);
}

TEST_CASE("adjacency-row clustering separates the same blocks") {
    const IntimacyMatrix m = disconnected_blocks();
    const Partition p = kmeans_adjacency(m, 3, 5);
    CHECK(same_partition(p.labels, kBlockTruth));
    CHECK(kmeans_adjacency(m, 3, 5).labels == p.labels);
}

TEST_CASE("an all-zero similarity matrix degenerates loudly") {
    IntimacyMatrix m = disconnected_blocks();
    m.values.setZero();
    const Partition p = kmeans_adjacency(m, 3, 2);
    CHECK(p.labels == std::vector<int>(12, 0));
    CHECK(!p.warnings.empty());

    // the spectral route survives isolated nodes and still labels everyone
    const Partition q = normalized_cut(m, 3, 2);
    CHECK(q.labels.size() == 12);
    for (int l : q.labels) {
        CHECK(l >= 0);
        CHECK(l < 3);
    }
}

TEST_CASE("single-source detection covers exactly its own roster") {
    SynthConfig cfg;
    cfg.n = 40;
    cfg.k_true = 3;
    cfg.esn_fraction = 0.5;
    cfg.p_out = 0.0;
    cfg.group_noise = 0.0;
    cfg.post_noise = 0.0;
    cfg.country_count = 3;
    cfg.zone_count = 3;
    cfg.seed = 4;
    const SynthDataset ds = generate(cfg);
    REQUIRE(ds.esn.users.size() < 40);

    FusionConfig fc;
    fc.k = 3;
    fc.eta = 0.005;
    fc.tol = 1e-10;
    fc.max_iters = 5000;
    fc.seed = 9;

    const Partition esn = humor_single_source(as_dataset(ds), Scope::esn, fc);
    CHECK(esn.index_order.size() == ds.esn.users.size());

    const Partition company = humor_single_source(as_dataset(ds), Scope::company, fc);
    CHECK(company.index_order.size() == 40);
    // clean chart signals alone should essentially nail the planted blocks
    CHECK(rand_index(company, ds.truth) >= 0.9);
}

TEST_CASE("partitions extend onto a larger roster with a sentinel community") {
    Partition p;
    p.k = 2;
    p.index_order = {"a", "b", "c"};
    p.labels = {0, 1, 1};

    const Partition grown = extend_to_roster(p, {"a", "b", "c", "d", "e"});
    CHECK(grown.k == 3);
    CHECK(grown.labels == std::vector<int>{0, 1, 1, 2, 2});
    CHECK(grown.index_order == std::vector<EmployeeId>{"a", "b", "c", "d", "e"});
    REQUIRE(!grown.warnings.empty());
    CHECK(grown.warnings.back().find("extended") != std::string::npos);

    // full coverage keeps k and adds nothing
    const Partition same = extend_to_roster(p, {"c", "a", "b"});
    CHECK(same.k == 2);
    CHECK(same.labels == std::vector<int>{1, 0, 1});
    CHECK(same.warnings.empty());
}
