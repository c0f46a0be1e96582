// Community-detection pipeline front end: generate synthetic enterprises,
// detect communities, evaluate partitions, benchmark methods.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "humor/baselines.hpp"
#include "humor/common.hpp"
#include "humor/metrics.hpp"
#include "humor/synth.hpp"

namespace {

using nlohmann::json;
using namespace humor;

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

// "--noise social=0.4" / "--noise all=0.1" accumulated into the six rates
void apply_noise_flag(SynthConfig& cfg, const std::vector<std::string>& flags) {
    for (const auto& flag : flags) {
        const auto eq = flag.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--noise", "expected <source>=<rate>, got '" + flag + "'");
        const std::string name = flag.substr(0, eq);
        double rate = 0.0;
        try {
            rate = std::stod(flag.substr(eq + 1));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--noise", "rate in '" + flag + "' is not a number");
        }
        if (name == "all") {
            cfg.source_noise.fill(rate);
        } else {
            cfg.source_noise[static_cast<std::size_t>(source_from_string(name))] = rate;
        }
    }
}

struct SolverFlags {
    // solver knobs mirror the library defaults; k alone is widened for detection
    int k = 4;
    double alpha = FusionConfig().alpha;
    double beta = FusionConfig().beta;
    double eta = FusionConfig().eta;
    int max_iters = FusionConfig().max_iters;
    double tol = FusionConfig().tol;
    std::uint64_t seed = 0;
    std::string mode = "joint";
    bool relaxed = false;

    FusionConfig to_config() const {
        FusionConfig cfg;
        cfg.k = k;
        cfg.alpha = alpha;
        cfg.beta = beta;
        cfg.eta = eta;
        cfg.max_iters = max_iters;
        cfg.tol = tol;
        cfg.seed = seed;
        cfg.alpha_relaxed = relaxed;
        if (mode == "joint") cfg.mode = FusionMode::joint;
        else if (mode == "esn") cfg.mode = FusionMode::esn_only;
        else if (mode == "chart") cfg.mode = FusionMode::chart_only;
        else throw std::invalid_argument("unknown mode '" + mode + "'");
        return cfg;
    }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--k", f.k, "community count")->capture_default_str();
    cmd->add_option("--alpha", f.alpha, "consistency weight (relaxed objective)")
        ->capture_default_str();
    cmd->add_option("--beta", f.beta, "online/offline coupling weight")->capture_default_str();
    cmd->add_option("--eta", f.eta, "gradient step size")->capture_default_str();
    cmd->add_option("--max-iters", f.max_iters, "iteration cap")->capture_default_str();
    cmd->add_option("--tol", f.tol, "relative objective change at convergence")
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--mode", f.mode, "information sources: joint, esn, chart")
        ->check(CLI::IsMember({"joint", "esn", "chart"}))
        ->capture_default_str();
    cmd->add_flag("--relaxed", f.relaxed,
                  "per-signal factors tied by alpha penalties instead of shared factors");
}

// Detection over a loaded dataset; shared by cmd_detect and cmd_bench.
Partition detect_partition(const Dataset& ds, const FusionConfig& cfg, FactorPair* fp_out) {
    if (cfg.mode != FusionMode::joint) {
        Partition p = humor_single_source(ds, cfg.mode == FusionMode::esn_only ? Scope::esn
                                                                               : Scope::company,
                                          cfg);
        if (fp_out) *fp_out = FactorPair{};
        return p;
    }
    const IntimacySet intimacies = compute_intimacies(ds.esn, ds.chart, true);
    const FusionProblem problem = FusionProblem::from(intimacies, ds.align);
    FactorPair fp = solve(problem, cfg);
    Partition p;
    p.k = cfg.k;
    p.index_order = problem.employee_order;
    Rng rng(cfg.seed);
    p.labels = kmeans_labels(fp.v, cfg.k, rng, &p.warnings);
    if (fp_out) *fp_out = std::move(fp);
    return p;
}

// Truth filtered down to the ids a partial partition actually covers.
Partition restrict_to(const Partition& truth, const Partition& covered) {
    std::map<std::string, int> keep;
    for (std::size_t i = 0; i < covered.index_order.size(); ++i) keep[covered.index_order[i]] = 1;
    Partition out;
    out.k = truth.k;
    for (std::size_t i = 0; i < truth.index_order.size(); ++i) {
        if (!keep.count(truth.index_order[i])) continue;
        out.index_order.push_back(truth.index_order[i]);
        out.labels.push_back(truth.labels[i]);
    }
    return out;
}

json intrinsic_metrics(const Partition& full, const SimilarityOracle& oracle) {
    json out;
    auto guarded = [&](const char* key, auto&& fn) {
        try {
            out[key] = fn();
        } catch (const ValidationError&) {
            out[key] = nullptr;  // metric undefined for this partition shape
        }
    };
    guarded("density", [&] { return density(full, oracle); });
    guarded("silhouette", [&] { return silhouette(full, oracle); });
    guarded("ndbi", [&] { return normalized_dbi(full, oracle); });
    guarded("entropy", [&] { return size_entropy(full); });
    return out;
}

json truth_metrics(const Partition& pred, const Partition& truth) {
    const Partition truth_covered = restrict_to(truth, pred);
    json out;
    out["rand"] = rand_index(pred, truth_covered);
    out["mi"] = mutual_information(pred, truth_covered);
    out["purity"] = purity(pred, truth_covered);
    out["inverse_purity"] = inverse_purity(pred, truth_covered);
    return out;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

int cmd_generate(const SynthConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const SynthDataset ds = generate(cfg);
    save_synth(ds, out_dir);
    json summary;
    summary["employees"] = cfg.n;
    summary["users"] = ds.esn.users.size();
    summary["follows"] = ds.esn.follows.size();
    summary["out"] = out_dir;
    std::cout << summary.dump() << "\n";
    return 0;
}

int cmd_detect(const std::string& esn_path, const std::string& chart_path,
               const SolverFlags& flags, const std::string& out_dir) {
    const FusionConfig cfg = flags.to_config();
    cfg.check();
    const Dataset ds = load_dataset(esn_path, chart_path);

    FactorPair fp;
    Partition p;
    if (cfg.mode == FusionMode::joint) {
        p = detect_partition(ds, cfg, &fp);
    } else {
        const Scope scope = cfg.mode == FusionMode::esn_only ? Scope::esn : Scope::company;
        const IntimacySet intimacies = compute_intimacies(ds.esn, ds.chart, true);
        const FusionProblem problem = FusionProblem::from(intimacies, ds.align);
        fp = solve(problem, cfg);
        Rng rng(cfg.seed);
        p.k = cfg.k;
        if (scope == Scope::esn) {
            p.index_order = problem.user_order;
            p.labels = kmeans_labels(fp.u, cfg.k, rng, &p.warnings);
        } else {
            p.index_order = problem.employee_order;
            p.labels = kmeans_labels(fp.v, cfg.k, rng, &p.warnings);
        }
    }

    const double coverage =
        static_cast<double>(p.index_order.size()) / ds.chart.employees.size();
    if (coverage < 1.0)
        p.warnings.push_back("partition covers " + std::to_string(p.index_order.size()) + " of " +
                             std::to_string(ds.chart.employees.size()) + " employees");

    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir.back() == '/' ? out_dir : out_dir + "/";
    save_partition(p, base + "partition.json");
    write_file(base + "trace.json", trace_to_json(fp));

    json summary;
    summary["converged"] = fp.converged;
    summary["iters"] = fp.iters;
    summary["objective"] = fp.trace.empty() ? 0.0 : fp.trace.back();
    summary["coverage"] = coverage;
    summary["warnings"] = p.warnings;
    std::cout << summary.dump() << "\n";
    return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& esn_path,
                 const std::string& chart_path, const std::optional<std::string>& truth_path) {
    const Dataset ds = load_dataset(esn_path, chart_path);
    const Partition pred = load_partition(pred_path);
    const auto roster = ds.chart.ids();
    const std::set<std::string> known(roster.begin(), roster.end());
    for (const auto& id : pred.index_order)
        if (!known.count(id))
            throw ValidationError("roster-mismatch",
                                  "'" + id + "' is not part of the organizational chart");
    const SimilarityOracle oracle = build_similarity_oracle(ds);

    // partial partitions (single-source runs) are padded with a sentinel
    // community for the intrinsic metrics and compared on covered ids only
    const Partition full = extend_to_roster(pred, ds.chart.ids());

    json out = intrinsic_metrics(full, oracle);
    if (truth_path) {
        const Partition truth = load_partition(*truth_path);
        const json vs = truth_metrics(pred, truth);
        for (const auto& [key, value] : vs.items()) out[key] = value;
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_bench(const std::string& esn_path, const std::string& chart_path,
              const std::optional<std::string>& truth_path, const SolverFlags& flags,
              const std::vector<std::string>& methods, const std::vector<std::uint64_t>& seeds) {
    for (const auto& m : methods) {
        if (m == "inf-esn" || m == "inf-chart")
            throw std::invalid_argument(
                "method '" + m + "' is out of scope: its influence-propagation model " +
                "is not specified here");
        static const std::vector<std::string> known{"humor",     "humor-esn",  "humor-chart",
                                                    "cut-esn",   "cut-chart",  "kmeans-esn",
                                                    "kmeans-chart"};
        if (std::find(known.begin(), known.end(), m) == known.end())
            throw std::invalid_argument("unknown method '" + m + "'");
    }
    if (seeds.empty()) throw std::invalid_argument("need at least one seed");

    const Dataset ds = load_dataset(esn_path, chart_path);
    const IntimacySet intimacies = compute_intimacies(ds.esn, ds.chart, true);
    const SimilarityOracle oracle = build_similarity_oracle(ds, intimacies);
    std::optional<Partition> truth;
    if (truth_path) truth = load_partition(*truth_path);

    const auto& social = intimacies.esn[0];
    const auto& chart_matrix = intimacies.chart[0];

    json table = json::array();
    for (const auto& method : methods) {
        std::map<std::string, std::vector<double>> samples;
        double coverage = 1.0;
        for (const auto seed : seeds) {
            FusionConfig cfg = flags.to_config();
            cfg.seed = seed;
            Partition p;
            if (method == "humor") {
                cfg.mode = FusionMode::joint;
                p = detect_partition(ds, cfg, nullptr);
            } else if (method == "humor-esn") {
                p = humor_single_source(ds, Scope::esn, cfg);
            } else if (method == "humor-chart") {
                p = humor_single_source(ds, Scope::company, cfg);
            } else if (method == "cut-esn") {
                p = normalized_cut(social, cfg.k, seed);
            } else if (method == "cut-chart") {
                p = normalized_cut(chart_matrix, cfg.k, seed);
            } else if (method == "kmeans-esn") {
                p = kmeans_adjacency(social, cfg.k, seed);
            } else {
                p = kmeans_adjacency(chart_matrix, cfg.k, seed);
            }

            coverage = static_cast<double>(p.index_order.size()) / ds.chart.employees.size();
            const Partition full = extend_to_roster(p, ds.chart.ids());
            json cell = intrinsic_metrics(full, oracle);
            if (truth) {
                const json vs = truth_metrics(p, *truth);
                for (const auto& [key, value] : vs.items()) cell[key] = value;
            }
            for (const auto& [key, value] : cell.items())
                if (!value.is_null()) samples[key].push_back(value.get<double>());
        }

        json row;
        row["method"] = method;
        row["coverage"] = coverage;
        row["seeds"] = seeds.size();
        for (const auto& [key, values] : samples)
            row[key] = values.empty() ? json() : json(median(values));
        table.push_back(std::move(row));
    }

    json out;
    out["k"] = flags.k;
    out["rows"] = table;
    std::cout << out.dump(2) << "\n";

    // human-readable mirror of the same numbers
    std::vector<std::string> columns{"rand", "mi", "purity", "inverse_purity",
                                     "density", "silhouette", "ndbi", "entropy"};
    std::ostringstream text;
    text << std::left << std::setw(14) << "method" << std::right << std::setw(10) << "coverage";
    for (const auto& c : columns) text << std::setw(15) << c;
    text << "\n";
    for (const auto& row : table) {
        text << std::left << std::setw(14) << row["method"].get<std::string>() << std::right
             << std::setw(10) << std::fixed << std::setprecision(2)
             << row["coverage"].get<double>();
        for (const auto& c : columns) {
            if (row.contains(c) && !row[c].is_null())
                text << std::setw(15) << std::setprecision(4) << row[c].get<double>();
            else
                text << std::setw(15) << "-";
        }
        text << "\n";
    }
    std::cerr << text.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Consistent employee community detection across an enterprise social "
                 "network and the company organizational chart"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic planted-community dataset");
    SynthConfig synth;
    std::vector<std::string> noise_flags;
    std::string gen_out = "data";
    gen->add_option("--n", synth.n, "employee count")->capture_default_str();
    gen->add_option("--k-true", synth.k_true, "planted community count")->capture_default_str();
    gen->add_option("--seed", synth.seed, "RNG seed")->capture_default_str();
    gen->add_option("--p-in", synth.p_in, "intra-community follow probability")
        ->capture_default_str();
    gen->add_option("--p-out", synth.p_out, "inter-community follow probability")
        ->capture_default_str();
    gen->add_option("--esn-fraction", synth.esn_fraction,
                    "share of each community present in the ESN")
        ->capture_default_str();
    gen->add_option("--groups-per-community", synth.groups_per_community, "")
        ->capture_default_str();
    gen->add_option("--group-noise", synth.group_noise, "outsider group-join leakage")
        ->capture_default_str();
    gen->add_option("--posts-per-community", synth.posts_per_community, "")
        ->capture_default_str();
    gen->add_option("--post-noise", synth.post_noise, "outsider reaction leakage")
        ->capture_default_str();
    gen->add_option("--title-vocab", synth.title_vocab_per_community,
                    "modifier words per community vocabulary")
        ->capture_default_str();
    gen->add_option("--countries", synth.country_count, "")->capture_default_str();
    gen->add_option("--zones", synth.zone_count, "")->capture_default_str();
    gen->add_option("--size-skew", synth.size_skew, "0 = near-equal community sizes")
        ->capture_default_str();
    gen->add_option("--noise", noise_flags,
                    "per-source corruption, e.g. --noise social=0.4 or --noise all=0.1");
    gen->add_option("--out", gen_out, "output directory")->capture_default_str();
    gen->set_config("--config", "", "key=value file; flags take precedence");

    // detect
    auto* det = app.add_subcommand("detect", "detect communities and write partition + trace");
    std::string det_esn, det_chart, det_out = "result";
    SolverFlags det_flags;
    det->add_option("--esn", det_esn, "esn.json path")->required();
    det->add_option("--chart", det_chart, "chart.json path")->required();
    det->add_option("--out", det_out, "output directory")->capture_default_str();
    add_solver_flags(det, det_flags);
    det->set_config("--config", "", "key=value file; flags take precedence");

    // evaluate
    auto* eva = app.add_subcommand("evaluate", "score a partition against the dataset");
    std::string eva_pred, eva_esn, eva_chart;
    std::string eva_truth;
    eva->add_option("--pred", eva_pred, "partition.json to score")->required();
    eva->add_option("--esn", eva_esn, "esn.json path")->required();
    eva->add_option("--chart", eva_chart, "chart.json path")->required();
    eva->add_option("--truth", eva_truth, "ground-truth partition (adds rand/mi/purity keys)");
    eva->set_config("--config", "", "key=value file; flags take precedence");

    // bench
    auto* ben = app.add_subcommand("bench", "compare methods over seeds (JSON + table)");
    std::string ben_esn, ben_chart, ben_truth;
    SolverFlags ben_flags;
    std::vector<std::string> ben_methods{"humor",   "humor-esn",  "humor-chart", "cut-esn",
                                         "cut-chart", "kmeans-esn", "kmeans-chart"};
    std::vector<std::uint64_t> ben_seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    ben->add_option("--esn", ben_esn, "esn.json path")->required();
    ben->add_option("--chart", ben_chart, "chart.json path")->required();
    ben->add_option("--truth", ben_truth, "ground-truth partition");
    ben->add_option("--methods", ben_methods, "comma-separated method list")
        ->delimiter(',')
        ->capture_default_str();
    ben->add_option("--seeds", ben_seeds, "comma-separated seed list")
        ->delimiter(',')
        ->capture_default_str();
    add_solver_flags(ben, ben_flags);
    ben->set_config("--config", "", "key=value file; flags take precedence");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << "error: usage: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*gen) {
            apply_noise_flag(synth, noise_flags);
            return cmd_generate(synth, gen_out);
        }
        if (*det) return cmd_detect(det_esn, det_chart, det_flags, det_out);
        if (*eva)
            return cmd_evaluate(eva_pred, eva_esn, eva_chart,
                                eva_truth.empty() ? std::nullopt
                                                  : std::optional<std::string>(eva_truth));
        if (*ben)
            return cmd_bench(ben_esn, ben_chart,
                             ben_truth.empty() ? std::nullopt
                                               : std::optional<std::string>(ben_truth),
                             ben_flags, ben_methods, ben_seeds);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
