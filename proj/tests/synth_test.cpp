#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "humor/assignment.hpp"
#include "humor/dataset.hpp"
#include "humor/fusion.hpp"
#include "humor/intimacy.hpp"
#include "humor/metrics.hpp"
#include "humor/synth.hpp"

using namespace humor;

namespace {

SynthConfig small_config(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n = 24;
    cfg.k_true = 3;
    cfg.country_count = 3;
    cfg.zone_count = 3;
    cfg.seed = seed;
    return cfg;
}

std::string dataset_fingerprint(const SynthDataset& ds) {
    return esn_to_json(ds.esn) + chart_to_json(ds.chart) + partition_to_json(ds.truth);
}

} // namespace

TEST_CASE("generation is a pure function of its configuration") {
    const SynthConfig cfg = small_config(77);
    CHECK(dataset_fingerprint(generate(cfg)) == dataset_fingerprint(generate(cfg)));

    SynthConfig other = cfg;
    other.seed = 78;
    CHECK(dataset_fingerprint(generate(other)) != dataset_fingerprint(generate(cfg)));
}

TEST_CASE("generated datasets pass validation across configurations") {
    std::vector<SynthConfig> configs;
    configs.push_back(small_config(1));

    SynthConfig partial = small_config(2);
    partial.esn_fraction = 0.5;
    configs.push_back(partial);

    SynthConfig skewed = small_config(3);
    skewed.n = 60;
    skewed.size_skew = 1.5;
    configs.push_back(skewed);

    SynthConfig noisy = small_config(4);
    noisy.group_noise = 0.3;
    noisy.post_noise = 0.3;
    noisy.source_noise = {0.2, 0.2, 0.2, 0.2, 0.2, 0.2};
    configs.push_back(noisy);

    SynthConfig flat = small_config(5);
    flat.p_in = 0.1;
    flat.p_out = 0.1;
    configs.push_back(flat);

    for (const auto& cfg : configs) {
        const SynthDataset ds = generate(cfg);
        CHECK(validate(ds.esn, ds.chart, ds.align).empty());
        CHECK(ds.truth.k == cfg.k_true);
        CHECK(ds.truth.labels.size() == static_cast<std::size_t>(cfg.n));
        CHECK(ds.truth.index_order == ds.chart.ids());
        const auto [lo, hi] =
            std::minmax_element(ds.truth.labels.begin(), ds.truth.labels.end());
        CHECK(*lo == 0);
        CHECK(*hi == cfg.k_true - 1);
    }
}

TEST_CASE("the config rejects out-of-range values") {
    auto broken = [](auto mutate) {
        SynthConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.check(), std::invalid_argument);
    };
    broken([](SynthConfig& c) { c.n = 1; });
    broken([](SynthConfig& c) { c.k_true = 1; });
    broken([](SynthConfig& c) { c.k_true = c.n + 1; });
    broken([](SynthConfig& c) { c.esn_fraction = 0.0; });
    broken([](SynthConfig& c) { c.esn_fraction = 1.1; });
    broken([](SynthConfig& c) { c.p_in = 0.1, c.p_out = 0.2; });
    broken([](SynthConfig& c) { c.group_noise = -0.1; });
    broken([](SynthConfig& c) { c.source_noise[3] = 1.5; });
    broken([](SynthConfig& c) { c.size_skew = -1.0; });
    broken([](SynthConfig& c) { c.country_count = 0; });
}

TEST_CASE("esn_fraction controls how much of the roster joins the network") {
    SynthConfig cfg = small_config(6);
    cfg.n = 40;

    cfg.esn_fraction = 1.0;
    CHECK(generate(cfg).esn.users.size() == 40);

    cfg.esn_fraction = 0.5;
    const SynthDataset half = generate(cfg);
    CHECK(half.esn.users.size() >= 16);
    CHECK(half.esn.users.size() <= 24);
    // everyone on the network is still a real employee
    for (int e : half.align.user_to_employee) CHECK(e >= 0);
}

TEST_CASE("size_skew tilts community sizes") {
    SynthConfig cfg = small_config(7);
    cfg.n = 100;
    cfg.k_true = 4;

    auto sizes = [](const SynthDataset& ds) {
        std::vector<int> out(ds.truth.k, 0);
        for (int l : ds.truth.labels) ++out[l];
        return out;
    };

    const std::vector<int> flat = sizes(generate(cfg));
    CHECK(*std::max_element(flat.begin(), flat.end()) -
              *std::min_element(flat.begin(), flat.end()) <=
          1);

    cfg.size_skew = 2.0;
    const std::vector<int> tilted = sizes(generate(cfg));
    CHECK(tilted.front() > tilted.back() + 10);
    for (int s : tilted) CHECK(s >= 1);  // no community disappears
}

TEST_CASE("with p_out zero every follow edge stays inside its community") {
    SynthConfig cfg = small_config(8);
    cfg.n = 60;
    cfg.p_out = 0.0;
    const SynthDataset ds = generate(cfg);
    REQUIRE(!ds.esn.follows.empty());

    const auto uidx = ds.esn.user_index();
    const auto eidx = ds.chart.id_index();
    for (const auto& [src, dst] : ds.esn.follows)
        CHECK(ds.truth.labels[eidx.at(src)] == ds.truth.labels[eidx.at(dst)]);
}

TEST_CASE("with p_in equal to p_out the follow graph carries no block signal") {
    SynthConfig cfg = small_config(9);
    cfg.n = 60;
    cfg.k_true = 4;
    cfg.p_in = 0.3;
    cfg.p_out = 0.3;
    const SynthDataset ds = generate(cfg);

    const auto eidx = ds.chart.id_index();
    auto is_within = [&](const std::string& a, const std::string& b) {
        return ds.truth.labels[eidx.at(a)] == ds.truth.labels[eidx.at(b)];
    };

    int within_edges = 0, cross_edges = 0;
    for (const auto& [src, dst] : ds.esn.follows) (is_within(src, dst) ? within_edges : cross_edges)++;

    long within_pairs = 0, cross_pairs = 0;
    for (std::size_t i = 0; i < ds.esn.users.size(); ++i)
        for (std::size_t j = i + 1; j < ds.esn.users.size(); ++j)
            (is_within(ds.esn.users[i], ds.esn.users[j]) ? within_pairs : cross_pairs)++;

    const double rate_within = static_cast<double>(within_edges) / within_pairs;
    const double rate_cross = static_cast<double>(cross_edges) / cross_pairs;
    CHECK(std::abs(rate_within - rate_cross) < 0.1);  // both estimate the same 0.3
}

TEST_CASE("corrupting one source leaves the other five matrices untouched") {
    const SynthDataset base = generate(small_config(10));
    const IntimacySet before = compute_intimacies(base.esn, base.chart, false);

    auto matrix_of = [](const IntimacySet& set, int which) -> const Eigen::MatrixXd& {
        return which < 3 ? set.esn[which].values : set.chart[which - 3].values;
    };

    for (int target = 0; target < 6; ++target) {
        const SynthDataset poked =
            corrupt_source(base, static_cast<Source>(target), 0.4, 900 + target);
        CHECK(validate(poked.esn, poked.chart, poked.align).empty());

        const IntimacySet after = compute_intimacies(poked.esn, poked.chart, false);
        for (int other = 0; other < 6; ++other) {
            const double diff =
                (matrix_of(after, other) - matrix_of(before, other)).cwiseAbs().maxCoeff();
            if (other == target) {
                CHECK(diff > 0.0);  // the corruption had to land somewhere
            } else {
                CHECK(diff == 0.0);
            }
        }
    }
}

TEST_CASE("corruption at rate zero is an exact copy") {
    const SynthDataset base = generate(small_config(11));
    for (int target = 0; target < 6; ++target) {
        const SynthDataset same = corrupt_source(base, static_cast<Source>(target), 0.0, 1);
        CHECK(dataset_fingerprint(same) == dataset_fingerprint(base));
    }
    CHECK_THROWS_AS(corrupt_source(base, Source::social, -0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(corrupt_source(base, Source::social, 1.1, 1), std::invalid_argument);
}

TEST_CASE("each clean source alone recovers the planted communities") {
    // Noiseless, fully separated regime: factoring any single intimacy
    // matrix and taking row argmaxes should find the planted blocks.
    FusionConfig fc;
    fc.k = 3;
    fc.eta = 0.005;
    fc.tol = 1e-10;
    fc.max_iters = 5000;

    for (int source = 0; source < 6; ++source) {
        std::vector<double> rands;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            SynthConfig cfg = small_config(seed);
            cfg.n = 60;  // blocks stay dense enough that p_in leaves no one isolated
            cfg.p_out = 0.0;
            cfg.group_noise = 0.0;
            cfg.post_noise = 0.0;
            const SynthDataset ds = generate(cfg);
            const IntimacySet set = compute_intimacies(ds.esn, ds.chart, true);
            const IntimacyMatrix& m =
                source < 3 ? set.esn[source] : set.chart[source - 3];

            fc.seed = seed;
            const Eigen::MatrixXd w = solve_single(m.values, fc);
            const Partition found = argmax_assign(w, m.index_order);
            rands.push_back(rand_index(found, ds.truth));
        }
        std::sort(rands.begin(), rands.end());
        const double median = 0.5 * (rands[4] + rands[5]);
        INFO("source ", source, " median rand ", median);
        CHECK(median >= 0.95);
    }
}

TEST_CASE("saved datasets load back byte-identically") {
    const auto dir = std::filesystem::temp_directory_path() / "humor_synth_test";
    std::filesystem::create_directories(dir);

    const SynthDataset ds = generate(small_config(12));
    save_synth(ds, dir.string());

    const Dataset loaded =
        load_dataset((dir / "esn.json").string(), (dir / "chart.json").string());
    CHECK(esn_to_json(loaded.esn) == esn_to_json(ds.esn));
    CHECK(chart_to_json(loaded.chart) == chart_to_json(ds.chart));

    const Partition truth = load_partition((dir / "truth.json").string());
    CHECK(truth.k == ds.truth.k);
    CHECK(rand_index(truth, ds.truth) == 1.0);
    std::filesystem::remove_all(dir);
}
