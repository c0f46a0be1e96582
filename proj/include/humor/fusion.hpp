#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "humor/dataset.hpp"
#include "humor/intimacy.hpp"

namespace humor {

enum class FusionMode { joint, esn_only, chart_only };

const char* to_string(FusionMode m);
FusionMode fusion_mode_from_string(const std::string& s);

struct FusionConfig {
    int k = 2;                   // community count
    double alpha = 1.0;          // consistency weight, used by the relaxed objective
    double beta = 5.0;           // weight coupling the two sources
    double eta = 0.05;           // gradient step size
    int max_iters = 300;
    double tol = 1e-4;           // relative objective change at convergence
    std::uint64_t seed = 0;
    FusionMode mode = FusionMode::joint;
    bool alpha_relaxed = false;  // keep per-signal factors tied by alpha penalties
                                 // instead of the hard shared-factor constraint

    void check() const;  // throws std::invalid_argument
};

/// Result of the alternating solve: the two factor matrices plus the
/// objective trace. u is empty in chart_only mode, v in esn_only mode.
struct FactorPair {
    Eigen::MatrixXd u;  // |U| x K
    Eigen::MatrixXd v;  // |N| x K
    std::vector<double> trace;        // objective, trace[0] = initial value
    std::vector<double> eta_u_trace;  // accepted step per iteration (0 = no-op step)
    std::vector<double> eta_v_trace;
    int iters = 0;
    bool converged = false;
};

/// The six intimacy matrices plus the user-to-employee transition matrix,
/// reduced to plain dense storage with a shared index order.
struct FusionProblem {
    std::vector<Eigen::MatrixXd> esn;    // each |U| x |U|, symmetric
    std::vector<Eigen::MatrixXd> chart;  // each |N| x |N|, symmetric
    Eigen::MatrixXd transition;          // |U| x |N|, binary, one 1 per row
    std::vector<EmployeeId> user_order;
    std::vector<EmployeeId> employee_order;

    int n_users() const { return static_cast<int>(transition.rows()); }
    int n_employees() const { return static_cast<int>(transition.cols()); }

    static FusionProblem from(const IntimacySet& intimacies, const AlignmentMap& align);
};

/// Joint reconstruction cost: squared Frobenius residuals of the three ESN
/// matrices against U U^T, the three chart matrices against V V^T, plus
/// beta times the cross-source residual between the mapped ESN structure
/// and V V^T. Single-source modes keep only their own half.
double objective(const FusionProblem& p, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                 const FusionConfig& cfg);

/// Analytic gradient of objective() with respect to u and v. Outputs are
/// resized; the one not owned by the mode is left empty.
void gradients(const FusionProblem& p, const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
               const FusionConfig& cfg, Eigen::MatrixXd& grad_u, Eigen::MatrixXd& grad_v);

/// Alternating projected gradient descent from a seeded uniform [0,1) start.
/// Each half step backtracks (halving eta) until the objective does not
/// increase, so the trace is non-increasing by construction.
FactorPair solve(const FusionProblem& p, const FusionConfig& cfg);

/// Factor a single intimacy matrix: min ||A - W W^T||_F^2, same scheme.
Eigen::MatrixXd solve_single(const Eigen::MatrixXd& a, const FusionConfig& cfg);

/// Shared-factor fit of several same-shape matrices: min sum_i ||A_i - W W^T||^2.
/// solve() with beta = 0 reduces to this on each source's triple.
FactorPair solve_stacked(const std::vector<Eigen::MatrixXd>& as, const FusionConfig& cfg);

/// Kernel computation plus solve in one call; uses cfg.mode to pick inputs.
FactorPair solve_dataset(const EsnGraph& graph, const OrgChart& chart, const AlignmentMap& align,
                         const FusionConfig& cfg, bool normalize_inputs = true);

/// Convergence trace as a JSON array of {iter, objective, eta_u, eta_v}.
std::string trace_to_json(const FactorPair& fp);

} // namespace humor
