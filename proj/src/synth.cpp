#include "humor/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "humor/common.hpp"

namespace humor {

namespace {

constexpr double kGroupJoin = 0.7;   // insider probability of joining a community group
constexpr double kPostReact = 0.6;   // insider probability of reacting to a community post
constexpr double kPrefixOdds = 0.5;  // chance a title carries a seniority prefix
constexpr double kModifierOdds = 0.5;

const std::vector<std::string>& title_prefixes() {
    static const std::vector<std::string> p{"senior", "junior", "principal", "staff"};
    return p;
}

std::string padded(const char* stem, int value, int width) {
    std::string digits = std::to_string(value);
    while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
    return stem + digits;
}

// community sizes: near-equal by default, geometrically tilted by size_skew,
// every community non-empty
std::vector<int> community_sizes(const SynthConfig& cfg) {
    std::vector<double> weight(cfg.k_true);
    for (int c = 0; c < cfg.k_true; ++c) weight[c] = std::pow(1.0 + cfg.size_skew, -c);
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);

    std::vector<int> sizes(cfg.k_true, 1);  // floor of one member each
    int assigned = cfg.k_true;
    std::vector<std::pair<double, int>> remainder;  // (-fraction, community)
    for (int c = 0; c < cfg.k_true; ++c) {
        const double exact = cfg.n * weight[c] / total;
        const int extra = std::max(0, static_cast<int>(exact) - 1);
        sizes[c] += extra;
        assigned += extra;
        remainder.emplace_back(-(exact - std::floor(exact)), c);
    }
    std::sort(remainder.begin(), remainder.end());  // biggest fraction first, ties by id
    for (int i = 0; assigned < cfg.n; i = (i + 1) % cfg.k_true, ++assigned)
        ++sizes[remainder[i].second];
    while (assigned > cfg.n) {  // floor-of-one overshoot on tiny n
        auto big = std::max_element(sizes.begin(), sizes.end());
        --*big;
        --assigned;
    }
    return sizes;
}

std::string make_title_string(int community, const SynthDataset& ds, Rng& rng) {
    std::string title;
    if (rng.coin(kPrefixOdds)) {
        const auto& prefixes = title_prefixes();
        title = prefixes[rng.below(prefixes.size())];
    }
    for (const auto& word : ds.title_vocab[community])
        if (rng.coin(kModifierOdds)) title += title.empty() ? word : " " + word;
    title += title.empty() ? ds.title_roots[community] : " " + ds.title_roots[community];
    return title;
}

Workplace make_workplace(int community, const SynthDataset& ds) {
    return {padded("country", community % ds.country_count, 1),
            padded("zone", community % ds.zone_count, 1)};
}

// ---- per-source corruption -------------------------------------------------
//
// Each helper rewires a `rate` fraction of the records behind one signal and
// touches nothing else. They are used both by generate() (with its main
// generator) and by corrupt_source() (with a fresh one).

void corrupt_follows(EsnGraph& esn, double rate, Rng& rng) {
    const auto n = esn.users.size();
    if (n < 2) return;
    std::set<std::pair<std::string, std::string>> live(esn.follows.begin(), esn.follows.end());
    for (auto& edge : esn.follows) {
        if (!rng.coin(rate)) continue;
        std::pair<std::string, std::string> fresh;
        bool found = false;
        for (int attempt = 0; attempt < 64 && !found; ++attempt) {
            const auto a = rng.below(n);
            auto b = rng.below(n - 1);
            if (b >= a) ++b;  // distinct endpoints without rejection
            fresh = {esn.users[a], esn.users[b]};
            found = fresh != edge && !live.count(fresh);
        }
        if (!found) continue;  // the follow graph is nearly complete
        live.erase(edge);
        live.insert(fresh);
        edge = fresh;
    }
}

void corrupt_memberships(EsnGraph& esn, double rate, Rng& rng) {
    const auto n = esn.users.size();
    if (n < 2) return;
    std::set<std::pair<std::string, std::string>> live(esn.memberships.begin(),
                                                       esn.memberships.end());
    for (auto& m : esn.memberships) {
        if (!rng.coin(rate)) continue;
        // swap out the member, keep the group, so no group is ever emptied
        std::pair<std::string, std::string> fresh;
        bool found = false;
        for (int attempt = 0; attempt < 64 && !found; ++attempt) {
            fresh = {esn.users[rng.below(n)], m.second};
            found = fresh.first != m.first && !live.count(fresh);
        }
        if (!found) continue;  // group already holds nearly everyone
        live.erase(m);
        live.insert(fresh);
        m = fresh;
    }
}

void corrupt_post_links(EsnGraph& esn, double rate, Rng& rng) {
    const auto n = esn.users.size();
    if (n < 2) return;
    std::set<std::tuple<std::string, std::string, int>> live;
    for (const auto& l : esn.post_links)
        live.emplace(l.user, l.post, static_cast<int>(l.kind));
    for (auto& l : esn.post_links) {
        if (!rng.coin(rate)) continue;
        std::tuple<std::string, std::string, int> fresh;
        bool found = false;
        for (int attempt = 0; attempt < 64 && !found; ++attempt) {
            fresh = {esn.users[rng.below(n)], l.post, static_cast<int>(l.kind)};
            found = std::get<0>(fresh) != l.user && !live.count(fresh);
        }
        if (!found) continue;
        live.erase({l.user, l.post, static_cast<int>(l.kind)});
        live.insert(fresh);
        l.user = std::get<0>(fresh);
    }
}

void corrupt_chart(OrgChart& chart, double rate, Rng& rng) {
    const int n = static_cast<int>(chart.employees.size());
    if (n < 3) return;
    const auto index = chart.id_index();
    for (auto& e : chart.employees) {
        if (!e.manager || !rng.coin(rate)) continue;
        const int self = index.at(e.id);
        // a manager inside this employee's subtree would close a cycle
        for (int attempt = 0; attempt < 32; ++attempt) {
            auto pick = rng.below(n - 1);
            if (static_cast<int>(pick) >= self) ++pick;
            bool reachable = false;
            for (const auto* walk = &chart.employees[pick]; walk->manager;) {
                if (walk->id == e.id) {
                    reachable = true;
                    break;
                }
                walk = &chart.employees[index.at(*walk->manager)];
            }
            if (!reachable && chart.employees[pick].id != *e.manager) {
                e.manager = chart.employees[pick].id;
                break;
            }
        }
    }
}

void corrupt_titles(OrgChart& chart, SynthDataset& ds, double rate, Rng& rng) {
    const int k = static_cast<int>(ds.title_roots.size());
    if (k == 0) return;  // no vocabulary to redraw from
    for (auto& e : chart.employees) {
        if (!rng.coin(rate)) continue;
        const int community = static_cast<int>(rng.below(k));
        e.title = make_job_title(make_title_string(community, ds, rng), chart.seniority_stopwords);
    }
}

void corrupt_workplaces(OrgChart& chart, SynthDataset& ds, double rate, Rng& rng) {
    for (auto& e : chart.employees) {
        if (!rng.coin(rate)) continue;
        e.workplace = {padded("country", static_cast<int>(rng.below(ds.country_count)), 1),
                       padded("zone", static_cast<int>(rng.below(ds.zone_count)), 1)};
    }
}

void corrupt_one(SynthDataset& ds, Source source, double rate, Rng& rng) {
    switch (source) {
        case Source::social: corrupt_follows(ds.esn, rate, rng); break;
        case Source::group: corrupt_memberships(ds.esn, rate, rng); break;
        case Source::post: corrupt_post_links(ds.esn, rate, rng); break;
        case Source::chart: corrupt_chart(ds.chart, rate, rng); break;
        case Source::title: corrupt_titles(ds.chart, ds, rate, rng); break;
        case Source::workplace: corrupt_workplaces(ds.chart, ds, rate, rng); break;
    }
}

} // namespace

void SynthConfig::check() const {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (k_true < 2 || k_true > n)
        throw std::invalid_argument("k_true must be between 2 and n");
    if (!(esn_fraction > 0.0) || esn_fraction > 1.0)
        throw std::invalid_argument("esn_fraction must be in (0, 1]");
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
        throw std::invalid_argument("edge probabilities must be in [0, 1]");
    if (p_out > p_in) throw std::invalid_argument("p_out must not exceed p_in");
    if (groups_per_community < 0 || posts_per_community < 0 || title_vocab_per_community < 0)
        throw std::invalid_argument("per-community counts must be nonnegative");
    if (country_count < 1 || zone_count < 1)
        throw std::invalid_argument("country/zone counts must be positive");
    if (group_noise < 0.0 || group_noise > 1.0 || post_noise < 0.0 || post_noise > 1.0)
        throw std::invalid_argument("noise rates must be in [0, 1]");
    for (double r : source_noise)
        if (r < 0.0 || r > 1.0) throw std::invalid_argument("source_noise rates must be in [0, 1]");
    if (size_skew < 0.0) throw std::invalid_argument("size_skew must be nonnegative");
}

SynthDataset generate(const SynthConfig& cfg) {
    cfg.check();
    Rng rng(cfg.seed);
    SynthDataset ds;
    ds.country_count = cfg.country_count;
    ds.zone_count = cfg.zone_count;

    const std::vector<int> sizes = community_sizes(cfg);
    const int id_width = std::max<int>(3, std::to_string(cfg.n - 1).size());

    // contiguous id ranges per community; first member doubles as its manager
    std::vector<int> community_of(cfg.n);
    std::vector<int> first_member(cfg.k_true);
    for (int c = 0, next = 0; c < cfg.k_true; ++c) {
        first_member[c] = next;
        for (int m = 0; m < sizes[c]; ++m, ++next) community_of[next] = c;
    }
    std::vector<EmployeeId> ids(cfg.n);
    for (int i = 0; i < cfg.n; ++i) ids[i] = padded("e", i, id_width);

    for (int c = 0; c < cfg.k_true; ++c) {
        ds.title_roots.push_back(padded("role", c, 1));
        auto& vocab = ds.title_vocab.emplace_back();
        for (int w = 0; w < cfg.title_vocab_per_community; ++w)
            vocab.push_back(padded("craft", c, 1) + padded("w", w, 1));
    }

    // ESN roster: a uniform per-community sample, at least one member each
    std::vector<char> in_esn(cfg.n, 0);
    for (int c = 0; c < cfg.k_true; ++c) {
        const int want = std::max<int>(1, std::llround(cfg.esn_fraction * sizes[c]));
        std::vector<int> pool(sizes[c]);
        for (int m = 0; m < sizes[c]; ++m) pool[m] = first_member[c] + m;
        for (int pick = 0; pick < want; ++pick) {
            const auto j = pick + rng.below(pool.size() - pick);
            std::swap(pool[pick], pool[j]);
            in_esn[pool[pick]] = 1;
        }
    }
    std::vector<int> user_community;
    std::vector<std::vector<int>> community_users(cfg.k_true);
    for (int i = 0; i < cfg.n; ++i) {
        if (!in_esn[i]) continue;
        community_users[community_of[i]].push_back(static_cast<int>(ds.esn.users.size()));
        ds.esn.users.push_back(ids[i]);
        user_community.push_back(community_of[i]);
    }
    const int n_users = static_cast<int>(ds.esn.users.size());

    // follow edges: planted partition over the ESN roster, random direction
    for (int i = 0; i < n_users; ++i) {
        for (int j = i + 1; j < n_users; ++j) {
            const double p = user_community[i] == user_community[j] ? cfg.p_in : cfg.p_out;
            if (!rng.coin(p)) continue;
            if (rng.coin(0.5))
                ds.esn.follows.emplace_back(ds.esn.users[i], ds.esn.users[j]);
            else
                ds.esn.follows.emplace_back(ds.esn.users[j], ds.esn.users[i]);
        }
    }

    // groups: insiders join eagerly, outsiders leak in at group_noise
    for (int c = 0; c < cfg.k_true; ++c) {
        for (int g = 0; g < cfg.groups_per_community; ++g) {
            const std::string group = padded("g", c, 1) + padded("_", g, 1);
            ds.esn.groups.push_back(group);
            bool empty = true;
            for (int u = 0; u < n_users; ++u) {
                const double p =
                    user_community[u] == c ? kGroupJoin : kGroupJoin * cfg.group_noise;
                if (rng.coin(p)) {
                    ds.esn.memberships.emplace_back(ds.esn.users[u], group);
                    empty = false;
                }
            }
            if (empty) {  // groups must have at least one member
                const auto& local = community_users[c];
                ds.esn.memberships.emplace_back(ds.esn.users[local[rng.below(local.size())]],
                                                group);
            }
        }
    }

    // posts: authored inside the community, reactions leak at post_noise
    for (int c = 0; c < cfg.k_true; ++c) {
        const auto& local = community_users[c];
        if (local.empty()) continue;
        for (int t = 0; t < cfg.posts_per_community; ++t) {
            const std::string post = padded("p", c, 1) + padded("_", t, 1);
            ds.esn.posts.push_back(post);
            const int author = local[rng.below(local.size())];
            ds.esn.post_links.push_back({ds.esn.users[author], post, PostKind::write});
            for (int u = 0; u < n_users; ++u) {
                if (u == author) continue;
                const double p =
                    user_community[u] == c ? kPostReact : kPostReact * cfg.post_noise;
                if (rng.coin(p))
                    ds.esn.post_links.push_back({ds.esn.users[u], post,
                                                 rng.coin(0.5) ? PostKind::comment
                                                               : PostKind::like});
            }
        }
    }

    // chart: flat community subtrees under a global root
    ds.chart.seniority_stopwords = default_seniority_stopwords();
    ds.chart.root = ids[first_member[0]];
    for (int i = 0; i < cfg.n; ++i) {
        const int c = community_of[i];
        OrgChart::Employee e;
        e.id = ids[i];
        if (i == first_member[0])
            e.manager.reset();  // global root
        else if (i == first_member[c])
            e.manager = ids[first_member[0]];  // community manager reports to the root
        else
            e.manager = ids[first_member[c]];
        e.title = make_job_title(make_title_string(c, ds, rng), ds.chart.seniority_stopwords);
        e.workplace = make_workplace(c, ds);
        ds.chart.employees.push_back(std::move(e));
    }

    ds.align = derive_alignment(ds.esn, ds.chart);

    ds.truth.k = cfg.k_true;
    ds.truth.index_order = ids;
    ds.truth.labels = community_of;

    for (std::size_t s = 0; s < cfg.source_noise.size(); ++s)
        if (cfg.source_noise[s] > 0.0)
            corrupt_one(ds, static_cast<Source>(s), cfg.source_noise[s], rng);

    const auto violations = validate(ds.esn, ds.chart, ds.align);
    if (!violations.empty())
        throw std::logic_error("generator produced an invalid dataset: " + violations[0].rule +
                               ": " + violations[0].detail);
    return ds;
}

SynthDataset corrupt_source(const SynthDataset& ds, Source source, double rate,
                            std::uint64_t seed) {
    if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("rate must be in [0, 1]");
    SynthDataset out = ds;
    Rng rng(seed);
    corrupt_one(out, source, rate, rng);
    out.align = derive_alignment(out.esn, out.chart);
    return out;
}

void save_synth(const SynthDataset& ds, const std::string& dir) {
    const std::string base = dir.empty() || dir.back() == '/' ? dir : dir + "/";
    save_esn(ds.esn, base + "esn.json");
    save_chart(ds.chart, base + "chart.json");
    save_partition(ds.truth, base + "truth.json");
}

} // namespace humor
