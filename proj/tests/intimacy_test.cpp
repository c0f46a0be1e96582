#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "humor/dataset.hpp"
#include "humor/intimacy.hpp"
#include "humor/synth.hpp"

using namespace humor;

namespace {

EsnGraph users_only(std::vector<std::string> users) {
    EsnGraph g;
    g.users = std::move(users);
    return g;
}

OrgChart::Employee employee(const std::string& id, const char* manager, const std::string& title,
                            const std::string& country = "US", const std::string& zone = "PST") {
    OrgChart::Employee e;
    e.id = id;
    if (manager) e.manager = manager;
    e.title = make_job_title(title, default_seniority_stopwords());
    e.workplace = {country, zone};
    return e;
}

int index_of(const IntimacyMatrix& m, const std::string& id) {
    for (int i = 0; i < m.size(); ++i)
        if (m.index_order[i] == id) return i;
    REQUIRE(false);
    return -1;
}

double at(const IntimacyMatrix& m, const std::string& a, const std::string& b) {
    return m.values(index_of(m, a), index_of(m, b));
}

} // namespace

TEST_CASE("social intimacy reproduces hand-derived pmi values") {
    // |U|=8, neighborhoods {a,b} and {a,c} share one user
    EsnGraph g = users_only({"u", "v", "a", "b", "c", "x", "y", "z"});
    g.follows = {{"u", "a"}, {"u", "b"}, {"v", "a"}, {"v", "c"}};
    const IntimacyMatrix m = social_intimacy(g);
    CHECK(at(m, "u", "v") == doctest::Approx(0.125 * std::log(2.0)).epsilon(1e-12));

    // |U|=4, identical one-element neighborhoods
    EsnGraph h = users_only({"u", "v", "a", "b"});
    h.follows = {{"u", "a"}, {"v", "a"}};
    CHECK(at(social_intimacy(h), "u", "v") ==
          doctest::Approx(0.25 * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("social intimacy is zero for disjoint neighborhoods") {
    EsnGraph g = users_only({"u", "v", "a", "b"});
    g.follows = {{"u", "a"}, {"v", "b"}};
    CHECK(at(social_intimacy(g), "u", "v") == 0.0);
}

TEST_CASE("social intimacy clamps negative pmi to zero") {
    // dense neighborhoods make the joint probability smaller than the product
    EsnGraph g = users_only({"u", "v", "a", "b"});
    g.follows = {{"u", "a"}, {"u", "b"}, {"u", "v"}, {"v", "a"}, {"v", "b"}};
    const double pmi = (2.0 / 4.0) * std::log((2.0 / 4.0) / ((3.0 / 4.0) * (3.0 / 4.0)));
    REQUIRE(pmi < 0.0);
    CHECK(at(social_intimacy(g), "u", "v") == 0.0);
}

TEST_CASE("social intimacy ignores edge direction") {
    EsnGraph g = users_only({"u", "v", "a", "b", "c"});
    g.follows = {{"u", "a"}, {"a", "v"}, {"b", "u"}, {"v", "c"}};
    EsnGraph reversed = g;
    for (auto& [src, dst] : reversed.follows) std::swap(src, dst);
    CHECK((social_intimacy(g).values - social_intimacy(reversed).values).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("group intimacy sums inverse membership weights over shared groups") {
    // |U|=8; u and v share a group of 2 and a group of 4
    EsnGraph g = users_only({"u", "v", "a", "b", "c", "d", "e", "f"});
    g.groups = {"small", "mid"};
    g.memberships = {{"u", "small"}, {"v", "small"}, {"u", "mid"},
                     {"v", "mid"},   {"a", "mid"},   {"b", "mid"}};
    const IntimacyMatrix m = group_intimacy(g);
    CHECK(at(m, "u", "v") == doctest::Approx(std::log(4.0) + std::log(2.0)).epsilon(1e-12));
    CHECK(at(m, "u", "a") == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(at(m, "a", "c") == 0.0);  // no shared group
}

TEST_CASE("the universal group contributes nothing") {
    EsnGraph g = users_only({"u", "v", "a"});
    g.groups = {"everyone"};
    g.memberships = {{"u", "everyone"}, {"v", "everyone"}, {"a", "everyone"}};
    CHECK(group_intimacy(g).values.maxCoeff() == 0.0);  // ln(3/3) = 0
}

TEST_CASE("post intimacy is the jaccard coefficient of pooled post sets") {
    EsnGraph g = users_only({"u", "v", "w"});
    g.posts = {"p1", "p2", "p3"};
    g.post_links = {{"u", "p1", PostKind::write},   {"u", "p2", PostKind::comment},
                    {"v", "p2", PostKind::like},    {"v", "p3", PostKind::write},
                    {"w", "p1", PostKind::comment}, {"w", "p1", PostKind::like}};
    const IntimacyMatrix m = post_intimacy(g);
    CHECK(at(m, "u", "v") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // w touched p1 twice through different link kinds; the pooled set is {p1}
    CHECK(at(m, "u", "w") == doctest::Approx(1.0 / 2.0).epsilon(1e-12));
    CHECK(at(m, "v", "w") == 0.0);
}

TEST_CASE("identical post sets score 1 and post-less pairs score 0") {
    EsnGraph g = users_only({"u", "v", "x", "y"});
    g.posts = {"p1"};
    g.post_links = {{"u", "p1", PostKind::write}, {"v", "p1", PostKind::like}};
    const IntimacyMatrix m = post_intimacy(g);
    CHECK(at(m, "u", "v") == 1.0);
    CHECK(at(m, "x", "y") == 0.0);
}

TEST_CASE("chart intimacy is the reciprocal tree distance") {
    OrgChart chart;
    chart.root = "r";
    chart.seniority_stopwords = default_seniority_stopwords();
    chart.employees = {employee("r", nullptr, "CEO"), employee("a", "r", "VP Sales"),
                       employee("b", "r", "VP Eng"), employee("c", "a", "Rep"),
                       employee("d", "a", "Rep Two")};
    const IntimacyMatrix m = chart_intimacy(chart);
    CHECK(at(m, "r", "a") == 1.0);   // manager and report
    CHECK(at(m, "a", "b") == 0.5);   // siblings via the root
    CHECK(at(m, "c", "d") == 0.5);   // siblings via a
    CHECK(at(m, "c", "b") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(m.values.diagonal().isZero(0.0));
}

TEST_CASE("chart intimacy matches breadth-first search distances on a random tree") {
    Rng rng(11);
    OrgChart chart;
    chart.root = "n0";
    chart.seniority_stopwords = default_seniority_stopwords();
    chart.employees.push_back(employee("n0", nullptr, "CEO"));
    const int n = 50;
    std::vector<std::vector<int>> adj(n);
    for (int i = 1; i < n; ++i) {
        const int parent = static_cast<int>(rng.below(i));
        chart.employees.push_back(
            employee("n" + std::to_string(i), ("n" + std::to_string(parent)).c_str(), "SDE"));
        adj[i].push_back(parent);
        adj[parent].push_back(i);
    }

    const IntimacyMatrix m = chart_intimacy(chart);
    for (int start = 0; start < n; ++start) {
        std::vector<int> dist(n, -1);
        std::vector<int> queue{start};
        dist[start] = 0;
        for (std::size_t q = 0; q < queue.size(); ++q)
            for (int next : adj[queue[q]])
                if (dist[next] == -1) {
                    dist[next] = dist[queue[q]] + 1;
                    queue.push_back(next);
                }
        for (int other = 0; other < n; ++other) {
            const double want = other == start ? 0.0 : 1.0 / dist[other];
            CHECK(m.values(start, other) == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("title intimacy needs a shared root term") {
    OrgChart chart;
    chart.root = "r";
    chart.seniority_stopwords = default_seniority_stopwords();
    chart.employees = {employee("r", nullptr, "CEO"), employee("a", "r", "Senior SDE"),
                       employee("b", "r", "SDE"), employee("c", "r", "Senior Researcher"),
                       employee("d", "r", "SDE")};
    const IntimacyMatrix m = title_intimacy(chart);
    CHECK(at(m, "a", "b") == 0.5);  // {sde} over {sde, senior}
    CHECK(at(m, "b", "d") == 1.0);  // identical titles
    CHECK(at(m, "a", "c") == 0.0);  // roots differ, indicator kills the term
    CHECK(at(m, "b", "c") == 0.0);
}

TEST_CASE("workplace intimacy averages the two equality indicators") {
    OrgChart chart;
    chart.root = "r";
    chart.seniority_stopwords = default_seniority_stopwords();
    chart.employees = {employee("r", nullptr, "CEO", "US", "PST"),
                       employee("a", "r", "SDE", "US", "PST"),
                       employee("b", "r", "SDE", "US", "EST"),
                       employee("c", "r", "SDE", "DE", "CET")};
    const IntimacyMatrix m = workplace_intimacy(chart);
    CHECK(at(m, "r", "a") == 1.0);
    CHECK(at(m, "r", "b") == 0.5);
    CHECK(at(m, "r", "c") == 0.0);
}

TEST_CASE("normalize rescales to unit maximum and is idempotent") {
    EsnGraph g = users_only({"u", "v", "a", "b", "c", "d", "e", "f"});
    g.groups = {"small"};
    g.memberships = {{"u", "small"}, {"v", "small"}};
    const IntimacyMatrix m = group_intimacy(g);  // max entry ln 4 > 1
    REQUIRE(m.values.maxCoeff() > 1.0);

    const IntimacyMatrix scaled = normalize(m);
    CHECK(scaled.values.maxCoeff() == 1.0);
    CHECK(scaled.values(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((normalize(scaled).values - scaled.values).cwiseAbs().maxCoeff() == 0.0);  // fixed point

    IntimacyMatrix zero = m;
    zero.values.setZero();
    CHECK(normalize(zero).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("every kernel output satisfies the matrix invariants on random data") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        SynthConfig cfg;
        cfg.n = 12;
        cfg.k_true = 3;
        cfg.seed = seed;
        cfg.esn_fraction = 0.8;
        const SynthDataset ds = generate(cfg);
        const IntimacySet set = compute_intimacies(ds.esn, ds.chart, true);
        for (const auto& m : set.esn) CHECK(m.check_invariants().empty());
        for (const auto& m : set.chart) CHECK(m.check_invariants().empty());
    }
}

TEST_CASE("kernels match per-pair brute-force formulas on random data") {
    for (std::uint64_t seed : {7, 8, 9}) {
        SynthConfig cfg;
        cfg.n = 10;
        cfg.k_true = 2;
        cfg.seed = seed;
        const SynthDataset ds = generate(cfg);
        const EsnGraph& g = ds.esn;
        const int n = static_cast<int>(g.users.size());

        const IntimacyMatrix social = social_intimacy(g);
        const IntimacyMatrix group = group_intimacy(g);
        const IntimacyMatrix post = post_intimacy(g);

        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const std::string& u = g.users[i];
                const std::string& v = g.users[j];

                std::set<std::string> nu, nv;
                for (const auto& [a, b] : g.follows) {
                    if (a == u) nu.insert(b);
                    if (b == u) nu.insert(a);
                    if (a == v) nv.insert(b);
                    if (b == v) nv.insert(a);
                }
                std::set<std::string> shared;
                for (const auto& x : nu)
                    if (nv.count(x)) shared.insert(x);
                double want = 0.0;
                if (!shared.empty()) {
                    const double pj = static_cast<double>(shared.size()) / n;
                    want = std::max(0.0, pj * std::log(pj * n * n / (nu.size() * nv.size())));
                }
                CHECK(social.values(i, j) == doctest::Approx(want).epsilon(1e-12));

                double imf = 0.0;
                for (const auto& grp : g.groups) {
                    std::set<std::string> members;
                    for (const auto& [user, gid] : g.memberships)
                        if (gid == grp) members.insert(user);
                    if (members.count(u) && members.count(v))
                        imf += std::log(static_cast<double>(n) / members.size());
                }
                CHECK(group.values(i, j) == doctest::Approx(imf).epsilon(1e-12));

                std::set<std::string> pu, pv;
                for (const auto& link : g.post_links) {
                    if (link.user == u) pu.insert(link.post);
                    if (link.user == v) pv.insert(link.post);
                }
                std::set<std::string> pshared;
                for (const auto& x : pu)
                    if (pv.count(x)) pshared.insert(x);
                const std::size_t uni = pu.size() + pv.size() - pshared.size();
                const double jc = uni == 0 ? 0.0 : static_cast<double>(pshared.size()) / uni;
                CHECK(post.values(i, j) == doctest::Approx(jc).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("matrix json dump carries source, ids, and dense rows") {
    EsnGraph g = users_only({"u", "v"});
    g.follows = {{"u", "v"}};
    const std::string text = matrix_to_json(social_intimacy(g));
    CHECK(text.find("\"source\": \"social\"") != std::string::npos);
    CHECK(text.find("\"ids\"") != std::string::npos);
    CHECK(text.find("\"rows\"") != std::string::npos);
    CHECK(text.back() == '\n');
}
