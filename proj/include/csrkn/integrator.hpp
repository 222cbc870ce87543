#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csrkn/problems.hpp"
#include "csrkn/tableau.hpp"

namespace csrkn {

enum class StageStructure {
    Auto,                      ///< sequential when a_bar is lower triangular
    FullImplicit,              ///< simultaneous fixed-point sweep over all stages
    SequentialLowerTriangular, ///< stage by stage, implicit only in a_bar(i,i)
};

struct StepConfig {
    double h = 0.0;
    /// Max-norm bound on successive stage increments, scaled by 1 + |q0|_inf.
    double stage_tol = 1e-14;
    int max_iters = 100;
    StageStructure structure = StageStructure::Auto;

    void validate() const;
};

/// One-step RKN map with preallocated stage storage. Not thread-safe; use
/// one instance per thread.
class RknStepper {
public:
    RknStepper(RknTableau tableau, int dim, StepConfig cfg);

    [[nodiscard]] const RknTableau& tableau() const noexcept { return tableau_; }
    [[nodiscard]] bool sequential() const noexcept { return sequential_; }
    [[nodiscard]] int last_iterations() const noexcept { return last_iterations_; }

    /// Stage values Q (dim x s, column i is stage i) for a step of signed
    /// size h. Throws StageDivergence when the iteration does not settle.
    const Eigen::MatrixXd& solve_stages(const ForceFn& f, double t0, std::span<const double> q0,
                                        std::span<const double> p0, double h);

    /// Advances (q0, p0) by h into (q1, p1). h may be negative.
    void step(const ForceFn& f, double t0, std::span<const double> q0,
              std::span<const double> p0, double h, std::span<double> q1, std::span<double> p1);

private:
    void solve_full(const ForceFn& f, double t0, double h, double tol);
    void solve_sequential(const ForceFn& f, double t0, double h, double tol);
    void eval_force(const ForceFn& f, double t, int stage);

    RknTableau tableau_;
    int dim_;
    StepConfig cfg_;
    bool sequential_;
    int last_iterations_ = 0;
    Eigen::MatrixXd base_;   // q0 + h c_i p0
    Eigen::MatrixXd stages_; // Q
    Eigen::MatrixXd next_;
    Eigen::MatrixXd forces_; // f(t0 + c_i h, Q_i)
    Eigen::VectorXd scratch_;
};

/// s x d matrix of stage values (row i is Q_i) for one step of cfg.h.
[[nodiscard]] Eigen::MatrixXd solve_stages(const RknTableau& t, const ForceFn& f, double t0,
                                           std::span<const double> q0,
                                           std::span<const double> p0, const StepConfig& cfg);

/// Max-norm residual of the stage equations at stage values Q (s x d).
[[nodiscard]] double stage_residual(const RknTableau& t, const ForceFn& f, double t0,
                                    std::span<const double> q0, std::span<const double> p0,
                                    double h, const Eigen::MatrixXd& stages);

struct StepResult {
    std::vector<double> q;
    std::vector<double> p;
};

[[nodiscard]] StepResult step(const RknTableau& t, const ForceFn& f, double t0,
                              std::span<const double> q0, std::span<const double> p0,
                              const StepConfig& cfg);

struct DriftFit {
    double slope = 0.0;   ///< OLS slope of energy error against time
    double max_abs = 0.0; ///< max |energy error|
};

/// Sampled states. q and p are flattened, dim entries per sample.
struct Trajectory {
    int dim = 0;
    std::vector<double> times;
    std::vector<double> q;
    std::vector<double> p;
    std::vector<double> energy_error; ///< H(p_n,q_n) - H(p_0,q_0); empty without energy
    /// Drift fit over every step (not just the samples); set when the problem
    /// has an energy. Decimated samples alias with the motion's period.
    std::optional<DriftFit> energy_fit;
    bool failed = false;
    long long failure_step = -1; ///< step index at which the solver gave up
    std::string failure_message;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] std::span<const double> q_at(std::size_t n) const
    {
        return std::span<const double>(q).subspan(n * dim, dim);
    }
    [[nodiscard]] std::span<const double> p_at(std::size_t n) const
    {
        return std::span<const double>(p).subspan(n * dim, dim);
    }
};

/// Number of steps of size h from t0 to t_end; throws Error(InvalidGrid)
/// unless (t_end - t0)/h is a non-negative integer to within 1e-9 relative.
[[nodiscard]] long long step_count(double t0, double t_end, double h);

/// Applies the method (t_end - t0)/h times, keeping every sample_every-th
/// state and the final one. A stage failure yields a partial trajectory with
/// failed set instead of an exception.
[[nodiscard]] Trajectory integrate(const RknTableau& t, const OdeProblem& prob, double t_end,
                                   const StepConfig& cfg, int sample_every = 1);

/// |rho Phi_h(rho Phi_h(z0)) - z0|_inf with rho(q, p) = (q, -p).
[[nodiscard]] double reversibility_test(const RknTableau& t, const OdeProblem& prob,
                                        const StepConfig& cfg);

/// Ordinary least-squares slope of y against x. Throws Error(DegenerateFit)
/// for fewer than two points or zero spread in x.
[[nodiscard]] double least_squares_slope(std::span<const double> x, std::span<const double> y);

struct ErrorStudy {
    std::vector<double> h;
    std::vector<double> error; ///< NaN where the solver failed
    double slope = 0.0;        ///< fit of log(error) on log(h) over finite rows
    std::string reference;
    bool any_failed = false;
};

/// The order-6 Gauss-3 method, used as a reference when no exact solution exists.
[[nodiscard]] RknTableau reference_tableau();

/// Global error at t_end in max norm over (q, p) for each step size. Step
/// sizes are processed concurrently; results keep the input order.
[[nodiscard]] ErrorStudy global_error_study(const RknTableau& t, const OdeProblem& prob,
                                            double t_end, std::span<const double> h_list,
                                            const StepConfig& cfg);

/// Fit over the stored samples only. Throws Error(InvalidArgument) if the
/// trajectory carries no energy series.
[[nodiscard]] DriftFit energy_drift(const Trajectory& traj);

} // namespace csrkn
