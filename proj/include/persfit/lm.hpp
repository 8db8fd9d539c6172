#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace persfit {

/// Damped least-squares configuration. Damping multiplies diag(H).
struct LMConfig {
    double lambda0 = 0.1;
    int max_iters = 30;
    double step_tol = 1e-8;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double lambda_min = 1e-7;
    double lambda_max = 1e7;

    void validate() const;
};

enum class LMStatus { StepTolReached, MaxIters, StalledDamping };

const char *to_string(LMStatus status);

struct LMIterationRecord {
    double cost = 0.0;      // cost of the trial state
    double lambda = 0.0;    // damping used for the step
    double step_norm = 0.0; // |delta|
    bool accepted = false;
};

struct LMTrace {
    double initial_cost = 0.0;
    double final_cost = 0.0;
    int accepted_steps = 0;
    std::vector<LMIterationRecord> iterations;
    LMStatus status = LMStatus::MaxIters;
};

/// Solves delta = -(H + lambda diag(H))^-1 J^T W r with H = J^T W J by LDLT.
/// Diagonal entries are floored at 1e-12 before damping. Throws
/// SingularSystemError when the damped system is not solvable; the caller
/// escalates lambda.
Eigen::VectorXd lm_step(const Eigen::VectorXd &r, const Eigen::VectorXd &w,
                        const Eigen::MatrixXd &J, double lambda);

/// Problem hooks for the generic loop. The state lives with the caller.
struct LMProblemFns {
    int num_params = 0;
    /// Linearize at the current state.
    std::function<void(Eigen::VectorXd &r, Eigen::VectorXd &w, Eigen::MatrixXd &J)> linearize;
    /// Weighted cost of the current state updated by delta (state untouched).
    std::function<double(const Eigen::VectorXd &delta)> trial_cost;
    /// Commit delta to the current state.
    std::function<void(const Eigen::VectorXd &delta)> apply;
};

struct LMRunResult {
    LMTrace trace;
    Eigen::MatrixXd hessian;    // undamped J^T W J at the final state
    Eigen::MatrixXd covariance; // sigma2 * pinv(hessian)
    double sigma2 = 0.0;        // residual variance estimate r^T W r / (rows - params)
};

/// Levenberg-Marquardt loop: steps are accepted only when they strictly
/// decrease the cost; rejections retry with lambda * lambda_up without
/// re-linearizing; stops when |delta| < step_tol, the accepted-iteration
/// budget is exhausted, or lambda escalation exceeds lambda_max.
LMRunResult lm_optimize(const LMProblemFns &problem, const LMConfig &config);

/// Pseudo-inverse through an eigendecomposition; eigenvalues below
/// 1e-12 * max are clamped up so rank-deficient directions report large
/// (finite) variances.
Eigen::MatrixXd clamped_inverse(const Eigen::MatrixXd &H);

} // namespace persfit
