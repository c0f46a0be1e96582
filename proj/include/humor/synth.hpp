#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "humor/assignment.hpp"
#include "humor/dataset.hpp"
#include "humor/intimacy.hpp"

namespace humor {

/// Controls for the planted-community enterprise generator.
struct SynthConfig {
    int n = 120;                 // employee count
    int k_true = 4;              // planted community count
    double esn_fraction = 1.0;   // share of each community present in the ESN
    double p_in = 0.3;           // follow-edge probability within a community
    double p_out = 0.02;         // and across communities
    int groups_per_community = 3;
    double group_noise = 0.1;    // scales the joining probability of outsiders
    int posts_per_community = 6;
    double post_noise = 0.1;     // scales outsider comment/like probability
    int title_vocab_per_community = 3;  // modifier words per community vocabulary
    int country_count = 4;
    int zone_count = 4;
    double size_skew = 0.0;      // 0 = near-equal sizes; >0 tilts toward low ids
    std::array<double, 6> source_noise{};  // post-hoc corruption rate per Source
    std::uint64_t seed = 0;

    void check() const;  // throws std::invalid_argument
};

/// A generated enterprise plus its planted truth. The vocabulary fields are
/// kept so later corruption can redraw titles and workplaces from the same
/// pools the generator used.
struct SynthDataset {
    EsnGraph esn;
    OrgChart chart;
    AlignmentMap align;
    Partition truth;

    std::vector<std::string> title_roots;               // one role word per community
    std::vector<std::vector<std::string>> title_vocab;  // modifier words per community
    int country_count = 1;
    int zone_count = 1;
};

/// Build a dataset whose six intimacy signals are all noisy views of one
/// planted partition. Communities are contiguous id ranges; the chart places
/// each community as a flat subtree under a per-community manager, managers
/// under a global root, so tree distance separates communities. All
/// randomness comes from one generator in a fixed order: ESN membership,
/// follow edges (pair loop, then orientation), groups, posts, titles, then
/// per-source corruption in Source enum order at the source_noise rates.
SynthDataset generate(const SynthConfig& cfg);

/// Rewire a `rate` fraction of the records behind one signal, leaving the
/// other five intimacy matrices bit-identical. rate 0 is an exact copy.
SynthDataset corrupt_source(const SynthDataset& ds, Source source, double rate,
                            std::uint64_t seed);

void save_synth(const SynthDataset& ds, const std::string& dir);  // esn/chart/truth .json

} // namespace humor
