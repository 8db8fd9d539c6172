#include "persfit/lm.hpp"

#include "persfit/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace persfit {

void LMConfig::validate() const {
    if (!(lambda0 > 0.0) || !(step_tol > 0.0) || max_iters < 1)
        throw DomainError("lm config: lambda0, step_tol and max_iters must be positive");
    if (!(lambda_down < 1.0) || !(lambda_up > 1.0))
        throw DomainError("lm config: need lambda_down < 1 < lambda_up");
    if (!(lambda_min > 0.0) || !(lambda_max > lambda_min))
        throw DomainError("lm config: invalid lambda clamps");
}

const char *to_string(LMStatus status) {
    switch (status) {
    case LMStatus::StepTolReached:
        return "converged";
    case LMStatus::MaxIters:
        return "max_iters";
    case LMStatus::StalledDamping:
        return "stalled";
    }
    return "invalid";
}

namespace {

constexpr double kDiagFloor = 1e-12;

bool solve_damped(const Eigen::MatrixXd &H, const Eigen::VectorXd &grad, double lambda,
                  Eigen::VectorXd *delta) {
    Eigen::MatrixXd damped = H;
    for (int i = 0; i < H.rows(); ++i)
        damped(i, i) += lambda * std::max(H(i, i), kDiagFloor);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
    if (ldlt.info() != Eigen::Success)
        return false;
    *delta = ldlt.solve(-grad);
    if (!delta->allFinite())
        return false;
    const double resid = (damped * *delta + grad).norm();
    return resid <= 1e-10 * std::max(grad.norm(), 1.0);
}

} // namespace

Eigen::VectorXd lm_step(const Eigen::VectorXd &r, const Eigen::VectorXd &w,
                        const Eigen::MatrixXd &J, double lambda) {
    if (r.size() != w.size() || r.size() != J.rows())
        throw DimensionMismatchError("lm_step: row counts disagree");
    const Eigen::MatrixXd WJ = w.asDiagonal() * J;
    const Eigen::MatrixXd H = J.transpose() * WJ;
    const Eigen::VectorXd grad = WJ.transpose() * r;
    Eigen::VectorXd delta;
    if (!solve_damped(H, grad, lambda, &delta))
        throw SingularSystemError("lm_step: damped normal equations not solvable");
    return delta;
}

Eigen::MatrixXd clamped_inverse(const Eigen::MatrixXd &H) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    const Eigen::VectorXd &vals = eig.eigenvalues();
    const double floor = 1e-12 * std::max(vals.cwiseAbs().maxCoeff(), 0.0);
    if (!(floor > 0.0))
        return Eigen::MatrixXd::Zero(H.rows(), H.cols());
    Eigen::VectorXd inv(vals.size());
    for (int i = 0; i < vals.size(); ++i)
        inv[i] = 1.0 / std::max(vals[i], floor);
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

LMRunResult lm_optimize(const LMProblemFns &problem, const LMConfig &config) {
    config.validate();
    LMRunResult result;
    LMTrace &trace = result.trace;

    Eigen::VectorXd r, w;
    Eigen::MatrixXd J;
    problem.linearize(r, w, J);
    double cost = (w.array() * r.array().square()).sum();
    trace.initial_cost = cost;
    trace.final_cost = cost;
    trace.status = LMStatus::MaxIters;

    double lambda = config.lambda0;
    bool done = false;
    while (!done && trace.accepted_steps < config.max_iters) {
        const Eigen::MatrixXd WJ = w.asDiagonal() * J;
        const Eigen::MatrixXd H = J.transpose() * WJ;
        const Eigen::VectorXd grad = WJ.transpose() * r;
        if (H.rows() == 0 || H.diagonal().maxCoeff() <= 0.0) {
            // No effective constraints: every damping fails.
            trace.status = LMStatus::StalledDamping;
            break;
        }

        // Retry with increasing damping on the same linearization.
        for (;;) {
            Eigen::VectorXd delta;
            if (!solve_damped(H, grad, lambda, &delta)) {
                lambda *= config.lambda_up;
                if (lambda > config.lambda_max) {
                    trace.status = LMStatus::StalledDamping;
                    done = true;
                    break;
                }
                continue;
            }
            const double step_norm = delta.norm();
            const double new_cost = problem.trial_cost(delta);
            LMIterationRecord rec;
            rec.lambda = lambda;
            rec.step_norm = step_norm;
            rec.cost = new_cost;
            if (std::isfinite(new_cost) && new_cost < cost) {
                rec.accepted = true;
                trace.iterations.push_back(rec);
                problem.apply(delta);
                cost = new_cost;
                trace.final_cost = cost;
                ++trace.accepted_steps;
                lambda = std::max(lambda * config.lambda_down, config.lambda_min);
                if (step_norm < config.step_tol) {
                    trace.status = LMStatus::StepTolReached;
                    done = true;
                    break;
                }
                problem.linearize(r, w, J);
                break;
            }
            trace.iterations.push_back(rec);
            if (step_norm < config.step_tol) {
                // The model proposes no meaningful move: stationary point.
                trace.status = LMStatus::StepTolReached;
                done = true;
                break;
            }
            lambda *= config.lambda_up;
            if (lambda > config.lambda_max) {
                trace.status = LMStatus::StalledDamping;
                done = true;
                break;
            }
        }
    }

    // Covariance from the undamped Hessian at the final accepted state,
    // scaled by the residual variance estimate.
    problem.linearize(r, w, J);
    const Eigen::MatrixXd WJ = w.asDiagonal() * J;
    result.hessian = J.transpose() * WJ;
    cost = (w.array() * r.array().square()).sum();
    trace.final_cost = cost;
    const long dof = std::max<long>(1, r.size() - problem.num_params);
    result.sigma2 = cost / static_cast<double>(dof);
    result.covariance = result.sigma2 * clamped_inverse(result.hessian);
    return result;
}

} // namespace persfit
