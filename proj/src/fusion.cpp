#include "humor/fusion.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "humor/common.hpp"

namespace humor {

namespace {

// Step sizes below this are pointless: the update underflows against the
// factor entries and the half step degenerates to a no-op.
constexpr double kMinEta = 0x1.0p-60;

Eigen::MatrixXd uniform_matrix(Rng& rng, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform();
    return m;
}

double sq_frobenius(const Eigen::MatrixXd& m) { return m.squaredNorm(); }

// sum_i ||A_i - W W^T||_F^2
double stacked_residual(const std::vector<Eigen::MatrixXd>& as, const Eigen::MatrixXd& w) {
    const Eigen::MatrixXd gram = w * w.transpose();
    double total = 0.0;
    for (const auto& a : as) total += sq_frobenius(a - gram);
    return total;
}

// gradient of stacked_residual: 4 n W W^T W - 4 (sum A_i) W
Eigen::MatrixXd stacked_gradient(const std::vector<Eigen::MatrixXd>& as, const Eigen::MatrixXd& w) {
    Eigen::MatrixXd a_sum = as.front();
    for (std::size_t i = 1; i < as.size(); ++i) a_sum += as[i];
    const Eigen::MatrixXd wtw = w.transpose() * w;  // k x k, cheaper than the gram
    return 4.0 * static_cast<double>(as.size()) * (w * wtw) - 4.0 * (a_sum * w);
}

void require_finite(const Eigen::MatrixXd& m, const char* what, int iteration, double eta) {
    if (!m.allFinite())
        throw NumericError(std::string(what) + " contains a non-finite value", iteration, eta);
}

// True when a column that had mass in `before` lost every entry in `after`.
// A zeroed column is absorbing under projected descent: the Gram-residual
// gradient vanishes on it, so the factor silently drops to rank k-1. Oversized
// steps can land there while still lowering the objective; a smaller step
// always exists that lowers it without leaving the interior.
bool annihilates_column(const Eigen::MatrixXd& before, const Eigen::MatrixXd& after) {
    for (Eigen::Index c = 0; c < before.cols(); ++c)
        if (before.col(c).maxCoeff() > 0.0 && after.col(c).maxCoeff() <= 0.0) return true;
    return false;
}

// One projected gradient half step with transient backtracking. `loss` must
// evaluate the full objective for a candidate of this block; `current` is the
// loss at w. Starts at cfg_eta each call, halves while the objective would
// increase or the step would annihilate a live column. Returns the accepted
// step size (0 when the step underflowed and w is unchanged) and updates w
// and current in place.
double descend(Eigen::MatrixXd& w, const Eigen::MatrixXd& grad, double cfg_eta, double& current,
               const std::function<double(const Eigen::MatrixXd&)>& loss, int iteration) {
    for (double eta = cfg_eta; eta >= kMinEta; eta /= 2.0) {
        Eigen::MatrixXd candidate = (w - eta * grad).cwiseMax(0.0);
        const double next = loss(candidate);
        if (std::isnan(next))
            throw NumericError("objective became NaN", iteration, eta);
        if (next <= current && !annihilates_column(w, candidate)) {
            w = std::move(candidate);
            current = next;
            return eta;
        }
    }
    return 0.0;  // no acceptable step; keep w
}

} // namespace

const char* to_string(FusionMode m) {
    switch (m) {
        case FusionMode::joint: return "joint";
        case FusionMode::esn_only: return "esn_only";
        case FusionMode::chart_only: return "chart_only";
    }
    return "joint";
}

FusionMode fusion_mode_from_string(const std::string& s) {
    if (s == "joint") return FusionMode::joint;
    if (s == "esn_only") return FusionMode::esn_only;
    if (s == "chart_only") return FusionMode::chart_only;
    throw ParseError("unknown fusion mode '" + s + "'");
}

void FusionConfig::check() const {
    if (k < 2) throw std::invalid_argument("k must be at least 2");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("alpha must be finite and nonnegative");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be finite and nonnegative");
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("eta must be finite and positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (!(tol >= 0.0)) throw std::invalid_argument("tol must be nonnegative");
    if (alpha_relaxed && mode != FusionMode::joint)
        throw std::invalid_argument("alpha_relaxed requires joint mode");
}

FusionProblem FusionProblem::from(const IntimacySet& intimacies, const AlignmentMap& align) {
    if (intimacies.esn.size() != 3 || intimacies.chart.size() != 3)
        throw std::invalid_argument("expected three ESN and three chart intimacy matrices");

    FusionProblem p;
    p.user_order = intimacies.esn.front().index_order;
    p.employee_order = intimacies.chart.front().index_order;
    for (const auto& m : intimacies.esn) {
        if (m.index_order != p.user_order)
            throw std::invalid_argument("ESN intimacy matrices disagree on user order");
        p.esn.push_back(m.values);
    }
    for (const auto& m : intimacies.chart) {
        if (m.index_order != p.employee_order)
            throw std::invalid_argument("chart intimacy matrices disagree on employee order");
        p.chart.push_back(m.values);
    }
    if (align.user_to_employee.size() != p.user_order.size())
        throw std::invalid_argument("alignment covers " +
                                    std::to_string(align.user_to_employee.size()) +
                                    " users, intimacies cover " +
                                    std::to_string(p.user_order.size()));
    p.transition = align.to_matrix(static_cast<int>(p.employee_order.size()));
    return p;
}

double objective(const FusionProblem& p, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                 const FusionConfig& cfg) {
    double total = 0.0;
    if (cfg.mode != FusionMode::chart_only) {
        const Eigen::MatrixXd gram_u = u * u.transpose();
        for (const auto& a : p.esn) total += sq_frobenius(a - gram_u);
    }
    if (cfg.mode != FusionMode::esn_only) {
        const Eigen::MatrixXd gram_v = v * v.transpose();
        for (const auto& a : p.chart) total += sq_frobenius(a - gram_v);
        if (cfg.mode == FusionMode::joint && cfg.beta > 0.0) {
            const Eigen::MatrixXd w = p.transition.transpose() * u;  // mapped ESN factor
            total += cfg.beta * sq_frobenius(w * w.transpose() - gram_v);
        }
    }
    return total;
}

void gradients(const FusionProblem& p, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
               const FusionConfig& cfg, Eigen::MatrixXd& grad_u, Eigen::MatrixXd& grad_v) {
    grad_u.resize(0, 0);
    grad_v.resize(0, 0);
    if (cfg.mode != FusionMode::chart_only) grad_u = stacked_gradient(p.esn, u);
    if (cfg.mode != FusionMode::esn_only) grad_v = stacked_gradient(p.chart, v);
    if (cfg.mode == FusionMode::joint && cfg.beta > 0.0) {
        // coupling residual R = W W^T - V V^T with W = T^T U:
        //   d/dU beta ||R||^2 =  4 beta T R W
        //   d/dV beta ||R||^2 = -4 beta R V
        const Eigen::MatrixXd w = p.transition.transpose() * u;
        const Eigen::MatrixXd r = w * w.transpose() - v * v.transpose();
        grad_u += 4.0 * cfg.beta * (p.transition * (r * w));
        grad_v -= 4.0 * cfg.beta * (r * v);
    }
}

namespace {

// Shared driver for the hard-constraint modes. Blocks not in play are empty.
FactorPair run_alternating(const FusionProblem& p, const FusionConfig& cfg) {
    Rng rng(cfg.seed);
    FactorPair fp;
    // Draw order is part of the contract: U first (row major), then V.
    if (cfg.mode != FusionMode::chart_only)
        fp.u = uniform_matrix(rng, p.n_users(), cfg.k);
    if (cfg.mode != FusionMode::esn_only)
        fp.v = uniform_matrix(rng, p.n_employees(), cfg.k);

    double current = objective(p, fp.u, fp.v, cfg);
    if (!std::isfinite(current)) throw NumericError("initial objective is not finite", 0, cfg.eta);
    fp.trace.push_back(current);

    Eigen::MatrixXd grad_u, grad_v;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const double previous = current;

        gradients(p, fp.u, fp.v, cfg, grad_u, grad_v);
        double eta_u = 0.0, eta_v = 0.0;
        if (cfg.mode != FusionMode::chart_only) {
            require_finite(grad_u, "gradient of u", iter, cfg.eta);
            eta_u = descend(fp.u, grad_u, cfg.eta, current,
                            [&](const Eigen::MatrixXd& cand) { return objective(p, cand, fp.v, cfg); },
                            iter);
        }
        if (cfg.mode != FusionMode::esn_only) {
            // V sees the U already moved this iteration
            if (cfg.mode == FusionMode::joint) gradients(p, fp.u, fp.v, cfg, grad_u, grad_v);
            require_finite(grad_v, "gradient of v", iter, cfg.eta);
            eta_v = descend(fp.v, grad_v, cfg.eta, current,
                            [&](const Eigen::MatrixXd& cand) { return objective(p, fp.u, cand, cfg); },
                            iter);
        }

        fp.trace.push_back(current);
        fp.eta_u_trace.push_back(eta_u);
        fp.eta_v_trace.push_back(eta_v);
        fp.iters = iter;

        const double rel = std::abs(previous - current) / std::max(previous, 1e-12);
        if (rel < cfg.tol) {
            fp.converged = true;
            break;
        }
    }
    return fp;
}

} // namespace

FactorPair solve(const FusionProblem& p, const FusionConfig& cfg) {
    cfg.check();
    if (cfg.mode != FusionMode::chart_only && p.esn.empty())
        throw std::invalid_argument("mode needs ESN matrices but none are present");
    if (cfg.mode != FusionMode::esn_only && p.chart.empty())
        throw std::invalid_argument("mode needs chart matrices but none are present");

    if (!cfg.alpha_relaxed) return run_alternating(p, cfg);

    // Relaxed form: each signal keeps its own factor, tied to the shared one
    // by an alpha penalty instead of being forced equal.
    //
    //   sum_i ||A_i - S_i S_i^T||^2 + alpha sum_i ||S_i - U||^2
    // + sum_j ||B_j - Z_j Z_j^T||^2 + alpha sum_j ||Z_j - V||^2
    // + beta ||(T^T U)(T^T U)^T - V V^T||^2
    Rng rng(cfg.seed);
    FactorPair fp;
    fp.u = uniform_matrix(rng, p.n_users(), cfg.k);
    fp.v = uniform_matrix(rng, p.n_employees(), cfg.k);
    std::vector<Eigen::MatrixXd> s(p.esn.size(), fp.u);  // start consistent:
    std::vector<Eigen::MatrixXd> z(p.chart.size(), fp.v);  // penalties are zero

    auto relaxed_objective = [&](const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                                 const std::vector<Eigen::MatrixXd>& ss,
                                 const std::vector<Eigen::MatrixXd>& zs) {
        double total = 0.0;
        for (std::size_t i = 0; i < p.esn.size(); ++i) {
            total += sq_frobenius(p.esn[i] - ss[i] * ss[i].transpose());
            total += cfg.alpha * sq_frobenius(ss[i] - u);
        }
        for (std::size_t j = 0; j < p.chart.size(); ++j) {
            total += sq_frobenius(p.chart[j] - zs[j] * zs[j].transpose());
            total += cfg.alpha * sq_frobenius(zs[j] - v);
        }
        if (cfg.beta > 0.0) {
            const Eigen::MatrixXd w = p.transition.transpose() * u;
            total += cfg.beta * sq_frobenius(w * w.transpose() - v * v.transpose());
        }
        return total;
    };

    double current = relaxed_objective(fp.u, fp.v, s, z);
    if (!std::isfinite(current)) throw NumericError("initial objective is not finite", 0, cfg.eta);
    fp.trace.push_back(current);

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const double previous = current;

        for (std::size_t i = 0; i < s.size(); ++i) {
            Eigen::MatrixXd grad = 4.0 * (s[i] * (s[i].transpose() * s[i])) -
                                   4.0 * (p.esn[i] * s[i]) + 2.0 * cfg.alpha * (s[i] - fp.u);
            require_finite(grad, "per-signal gradient", iter, cfg.eta);
            descend(s[i], grad, cfg.eta, current,
                    [&](const Eigen::MatrixXd& cand) {
                        auto trial = s;
                        trial[i] = cand;
                        return relaxed_objective(fp.u, fp.v, trial, z);
                    },
                    iter);
        }
        {
            Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(fp.u.rows(), fp.u.cols());
            for (const auto& si : s) grad += 2.0 * cfg.alpha * (fp.u - si);
            if (cfg.beta > 0.0) {
                const Eigen::MatrixXd w = p.transition.transpose() * fp.u;
                const Eigen::MatrixXd r = w * w.transpose() - fp.v * fp.v.transpose();
                grad += 4.0 * cfg.beta * (p.transition * (r * w));
            }
            require_finite(grad, "gradient of u", iter, cfg.eta);
            fp.eta_u_trace.push_back(descend(
                fp.u, grad, cfg.eta, current,
                [&](const Eigen::MatrixXd& cand) { return relaxed_objective(cand, fp.v, s, z); },
                iter));
        }
        for (std::size_t j = 0; j < z.size(); ++j) {
            Eigen::MatrixXd grad = 4.0 * (z[j] * (z[j].transpose() * z[j])) -
                                   4.0 * (p.chart[j] * z[j]) + 2.0 * cfg.alpha * (z[j] - fp.v);
            require_finite(grad, "per-signal gradient", iter, cfg.eta);
            descend(z[j], grad, cfg.eta, current,
                    [&](const Eigen::MatrixXd& cand) {
                        auto trial = z;
                        trial[j] = cand;
                        return relaxed_objective(fp.u, fp.v, s, trial);
                    },
                    iter);
        }
        {
            Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(fp.v.rows(), fp.v.cols());
            for (const auto& zj : z) grad += 2.0 * cfg.alpha * (fp.v - zj);
            if (cfg.beta > 0.0) {
                const Eigen::MatrixXd w = p.transition.transpose() * fp.u;
                const Eigen::MatrixXd r = w * w.transpose() - fp.v * fp.v.transpose();
                grad -= 4.0 * cfg.beta * (r * fp.v);
            }
            require_finite(grad, "gradient of v", iter, cfg.eta);
            fp.eta_v_trace.push_back(descend(
                fp.v, grad, cfg.eta, current,
                [&](const Eigen::MatrixXd& cand) { return relaxed_objective(fp.u, cand, s, z); },
                iter));
        }

        fp.trace.push_back(current);
        fp.iters = iter;
        const double rel = std::abs(previous - current) / std::max(previous, 1e-12);
        if (rel < cfg.tol) {
            fp.converged = true;
            break;
        }
    }
    return fp;
}

FactorPair solve_stacked(const std::vector<Eigen::MatrixXd>& as, const FusionConfig& cfg) {
    cfg.check();
    if (as.empty()) throw std::invalid_argument("no matrices to factor");
    const auto rows = as.front().rows();
    for (const auto& a : as)
        if (a.rows() != rows || a.cols() != rows)
            throw std::invalid_argument("matrices must be square and same size");

    Rng rng(cfg.seed);
    FactorPair fp;
    fp.u = uniform_matrix(rng, static_cast<int>(rows), cfg.k);

    double current = stacked_residual(as, fp.u);
    if (!std::isfinite(current)) throw NumericError("initial objective is not finite", 0, cfg.eta);
    fp.trace.push_back(current);

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const double previous = current;
        Eigen::MatrixXd grad = stacked_gradient(as, fp.u);
        require_finite(grad, "gradient", iter, cfg.eta);
        fp.eta_u_trace.push_back(descend(
            fp.u, grad, cfg.eta, current,
            [&](const Eigen::MatrixXd& cand) { return stacked_residual(as, cand); }, iter));
        fp.trace.push_back(current);
        fp.iters = iter;
        const double rel = std::abs(previous - current) / std::max(previous, 1e-12);
        if (rel < cfg.tol) {
            fp.converged = true;
            break;
        }
    }
    return fp;
}

Eigen::MatrixXd solve_single(const Eigen::MatrixXd& a, const FusionConfig& cfg) {
    return solve_stacked({a}, cfg).u;
}

FactorPair solve_dataset(const EsnGraph& graph, const OrgChart& chart, const AlignmentMap& align,
                         const FusionConfig& cfg, bool normalize_inputs) {
    const IntimacySet intimacies = compute_intimacies(graph, chart, normalize_inputs);
    const FusionProblem p = FusionProblem::from(intimacies, align);
    FactorPair fp = solve(p, cfg);
    return fp;
}

std::string trace_to_json(const FactorPair& fp) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t t = 0; t < fp.trace.size(); ++t) {
        nlohmann::json row;
        row["iter"] = static_cast<int>(t);
        row["objective"] = fp.trace[t];
        // entry 0 is the starting point; no step was taken to reach it
        row["eta_u"] = t == 0 || fp.eta_u_trace.empty() ? 0.0 : fp.eta_u_trace[t - 1];
        row["eta_v"] = t == 0 || fp.eta_v_trace.empty() ? 0.0 : fp.eta_v_trace[t - 1];
        out.push_back(std::move(row));
    }
    return out.dump(2) + "\n";
}

} // namespace humor
