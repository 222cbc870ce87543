#include "csrkn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <set>
#include <sstream>

#include "csrkn/cscoeff.hpp"
#include "csrkn/error.hpp"
#include "csrkn/quadrature.hpp"

namespace csrkn {

namespace {

double max_norm(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

[[noreturn]] void diverged(int iterations, double residual)
{
    std::ostringstream os;
    os << "stage iteration did not converge after " << iterations
       << " iterations (last increment " << residual << "); step size too large";
    throw StageDivergence(os.str(), residual);
}

// Streaming least-squares fit of y on x (Welford-style co-moments).
class OnlineSlope {
public:
    void add(double x, double y)
    {
        ++n_;
        const double dx = x - mean_x_;
        mean_x_ += dx / n_;
        mean_y_ += (y - mean_y_) / n_;
        sxx_ += dx * (x - mean_x_);
        sxy_ += dx * (y - mean_y_);
        max_abs_ = std::max(max_abs_, std::abs(y));
    }

    [[nodiscard]] DriftFit fit() const
    {
        return {sxx_ > 0.0 ? sxy_ / sxx_ : 0.0, max_abs_};
    }

private:
    long long n_ = 0;
    double mean_x_ = 0.0;
    double mean_y_ = 0.0;
    double sxx_ = 0.0;
    double sxy_ = 0.0;
    double max_abs_ = 0.0;
};

} // namespace

void StepConfig::validate() const
{
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw Error(ErrorCode::InvalidArgument, "step size must be positive");
    }
    if (!(stage_tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "stage tolerance must be positive");
    }
    if (max_iters < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
    }
}

RknStepper::RknStepper(RknTableau tableau, int dim, StepConfig cfg)
    : tableau_(std::move(tableau)), dim_(dim), cfg_(cfg)
{
    tableau_.validate();
    if (dim_ < 1) {
        throw Error(ErrorCode::InvalidArgument, "problem dimension must be positive");
    }
    if (!(cfg_.stage_tol > 0.0) || cfg_.max_iters < 1) {
        throw Error(ErrorCode::InvalidArgument, "invalid stage solver settings");
    }
    switch (cfg_.structure) {
    case StageStructure::Auto:
        sequential_ = is_lower_triangular(tableau_);
        break;
    case StageStructure::FullImplicit:
        sequential_ = false;
        break;
    case StageStructure::SequentialLowerTriangular:
        if (!is_lower_triangular(tableau_)) {
            throw Error(ErrorCode::InvalidArgument,
                        "sequential stage solving needs a lower-triangular a_bar");
        }
        sequential_ = true;
        break;
    }
    const int s = tableau_.stages();
    base_.resize(dim_, s);
    stages_.resize(dim_, s);
    next_.resize(dim_, s);
    forces_.resize(dim_, s);
    scratch_.resize(dim_);
}

void RknStepper::eval_force(const ForceFn& f, double t, int stage)
{
    f(t, std::span<const double>(stages_.col(stage).data(), dim_),
      std::span<double>(forces_.col(stage).data(), dim_));
}

const Eigen::MatrixXd& RknStepper::solve_stages(const ForceFn& f, double t0,
                                                std::span<const double> q0,
                                                std::span<const double> p0, double h)
{
    const int s = tableau_.stages();
    const Eigen::Map<const Eigen::VectorXd> q(q0.data(), dim_);
    const Eigen::Map<const Eigen::VectorXd> p(p0.data(), dim_);
    for (int i = 0; i < s; ++i) {
        base_.col(i) = q + (h * tableau_.c(i)) * p;
    }
    stages_ = base_;
    const double tol = cfg_.stage_tol * (1.0 + max_norm(q0));
    if (sequential_) {
        solve_sequential(f, t0, h, tol);
    } else {
        solve_full(f, t0, h, tol);
    }
    return stages_;
}

void RknStepper::solve_full(const ForceFn& f, double t0, double h, double tol)
{
    const int s = tableau_.stages();
    const double h2 = h * h;
    double increment = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cfg_.max_iters; ++it) {
        for (int j = 0; j < s; ++j) {
            eval_force(f, t0 + tableau_.c(j) * h, j);
        }
        next_.noalias() = base_;
        next_.noalias() += h2 * forces_ * tableau_.a_bar.transpose();
        increment = (next_ - stages_).cwiseAbs().maxCoeff();
        stages_.swap(next_);
        if (!std::isfinite(increment)) {
            diverged(it, increment);
        }
        if (increment < tol) {
            last_iterations_ = it;
            for (int j = 0; j < s; ++j) {
                eval_force(f, t0 + tableau_.c(j) * h, j);
            }
            return;
        }
    }
    diverged(cfg_.max_iters, increment);
}

void RknStepper::solve_sequential(const ForceFn& f, double t0, double h, double tol)
{
    const int s = tableau_.stages();
    const double h2 = h * h;
    int total = 0;
    for (int i = 0; i < s; ++i) {
        const double ti = t0 + tableau_.c(i) * h;
        auto known = next_.col(i);
        known = base_.col(i);
        for (int j = 0; j < i; ++j) {
            known += (h2 * tableau_.a_bar(i, j)) * forces_.col(j);
        }
        stages_.col(i) = known;
        const double diag = tableau_.a_bar(i, i);
        if (diag != 0.0) {
            double increment = std::numeric_limits<double>::infinity();
            int it = 1;
            for (; it <= cfg_.max_iters; ++it) {
                eval_force(f, ti, i);
                scratch_ = known + (h2 * diag) * forces_.col(i);
                increment = (scratch_ - stages_.col(i)).cwiseAbs().maxCoeff();
                stages_.col(i) = scratch_;
                if (!std::isfinite(increment)) {
                    diverged(it, increment);
                }
                if (increment < tol) {
                    break;
                }
            }
            if (it > cfg_.max_iters) {
                diverged(cfg_.max_iters, increment);
            }
            total = std::max(total, it);
        }
        eval_force(f, ti, i);
    }
    last_iterations_ = total;
}

void RknStepper::step(const ForceFn& f, double t0, std::span<const double> q0,
                      std::span<const double> p0, double h, std::span<double> q1,
                      std::span<double> p1)
{
    solve_stages(f, t0, q0, p0, h);
    const int s = tableau_.stages();
    // Ascending stage order keeps trajectories bit-reproducible.
    for (int k = 0; k < dim_; ++k) {
        double dq = 0.0;
        double dp = 0.0;
        for (int i = 0; i < s; ++i) {
            dq += tableau_.b_bar(i) * forces_(k, i);
            dp += tableau_.b(i) * forces_(k, i);
        }
        q1[k] = q0[k] + h * p0[k] + h * h * dq;
        p1[k] = p0[k] + h * dp;
    }
}

Eigen::MatrixXd solve_stages(const RknTableau& t, const ForceFn& f, double t0,
                             std::span<const double> q0, std::span<const double> p0,
                             const StepConfig& cfg)
{
    cfg.validate();
    RknStepper stepper(t, static_cast<int>(q0.size()), cfg);
    return stepper.solve_stages(f, t0, q0, p0, cfg.h).transpose();
}

double stage_residual(const RknTableau& t, const ForceFn& f, double t0,
                      std::span<const double> q0, std::span<const double> p0, double h,
                      const Eigen::MatrixXd& stages)
{
    const int s = t.stages();
    const auto dim = static_cast<int>(q0.size());
    Eigen::MatrixXd forces(s, dim);
    Eigen::VectorXd out(dim);
    for (int j = 0; j < s; ++j) {
        const Eigen::VectorXd qj = stages.row(j).transpose();
        f(t0 + t.c(j) * h, std::span<const double>(qj.data(), dim),
          std::span<double>(out.data(), dim));
        forces.row(j) = out.transpose();
    }
    double worst = 0.0;
    for (int i = 0; i < s; ++i) {
        for (int k = 0; k < dim; ++k) {
            double rhs = q0[k] + h * t.c(i) * p0[k];
            for (int j = 0; j < s; ++j) {
                rhs += h * h * t.a_bar(i, j) * forces(j, k);
            }
            worst = std::max(worst, std::abs(stages(i, k) - rhs));
        }
    }
    return worst;
}

StepResult step(const RknTableau& t, const ForceFn& f, double t0, std::span<const double> q0,
                std::span<const double> p0, const StepConfig& cfg)
{
    cfg.validate();
    RknStepper stepper(t, static_cast<int>(q0.size()), cfg);
    StepResult r{std::vector<double>(q0.size()), std::vector<double>(p0.size())};
    stepper.step(f, t0, q0, p0, cfg.h, r.q, r.p);
    return r;
}

long long step_count(double t0, double t_end, double h)
{
    if (!(h > 0.0)) {
        throw Error(ErrorCode::InvalidGrid, "step size must be positive");
    }
    const double ratio = (t_end - t0) / h;
    const double n = std::round(ratio);
    if (!std::isfinite(ratio) || n < 0.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, n)) {
        std::ostringstream os;
        os.precision(17);
        os << "interval [" << t0 << ", " << t_end << "] is not a whole number of steps of " << h;
        throw Error(ErrorCode::InvalidGrid, os.str());
    }
    return static_cast<long long>(n);
}

Trajectory integrate(const RknTableau& t, const OdeProblem& prob, double t_end,
                     const StepConfig& cfg, int sample_every)
{
    cfg.validate();
    if (sample_every < 1) {
        throw Error(ErrorCode::InvalidArgument, "sample_every must be >= 1");
    }
    const long long n = step_count(prob.t0, t_end, cfg.h);
    const int dim = prob.dim;
    RknStepper stepper(t, dim, cfg);

    Trajectory traj;
    traj.dim = dim;
    const bool with_energy = prob.has_energy();
    std::vector<double> q = prob.q0;
    std::vector<double> p = prob.p0;
    std::vector<double> q_next(dim);
    std::vector<double> p_next(dim);
    const double h0 = with_energy ? prob.energy(p, q) : 0.0;
    OnlineSlope drift;

    auto record = [&](double time) {
        traj.times.push_back(time);
        traj.q.insert(traj.q.end(), q.begin(), q.end());
        traj.p.insert(traj.p.end(), p.begin(), p.end());
        if (with_energy) {
            traj.energy_error.push_back(prob.energy(p, q) - h0);
        }
    };

    record(prob.t0);
    if (with_energy) {
        drift.add(prob.t0, 0.0);
    }
    for (long long k = 0; k < n; ++k) {
        const double tk = prob.t0 + static_cast<double>(k) * cfg.h;
        try {
            stepper.step(prob.force, tk, q, p, cfg.h, q_next, p_next);
        } catch (const StageDivergence& e) {
            traj.failed = true;
            traj.failure_step = k;
            traj.failure_message = e.what();
            break;
        }
        q.swap(q_next);
        p.swap(p_next);
        const double t_next = prob.t0 + static_cast<double>(k + 1) * cfg.h;
        if (with_energy) {
            drift.add(t_next, prob.energy(p, q) - h0);
        }
        if ((k + 1) % sample_every == 0 || k + 1 == n) {
            record(t_next);
        }
    }
    if (with_energy) {
        traj.energy_fit = drift.fit();
    }
    return traj;
}

double reversibility_test(const RknTableau& t, const OdeProblem& prob, const StepConfig& cfg)
{
    cfg.validate();
    const int dim = prob.dim;
    RknStepper stepper(t, dim, cfg);
    std::vector<double> q1(dim), p1(dim), q2(dim), p2(dim);
    stepper.step(prob.force, prob.t0, prob.q0, prob.p0, cfg.h, q1, p1);
    for (double& v : p1) {
        v = -v;
    }
    stepper.step(prob.force, prob.t0, q1, p1, cfg.h, q2, p2);
    double dev = 0.0;
    for (int k = 0; k < dim; ++k) {
        dev = std::max(dev, std::abs(q2[k] - prob.q0[k]));
        dev = std::max(dev, std::abs(-p2[k] - prob.p0[k]));
    }
    return dev;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(ErrorCode::DegenerateFit, "slope fit needs at least two points");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw Error(ErrorCode::DegenerateFit, "slope fit needs distinct abscissae");
    }
    return sxy / sxx;
}

RknTableau reference_tableau()
{
    RknTableau t = discretize(build_order6(0.0), gauss_rule(3));
    t.label = "order6 gauss-3";
    return t;
}

ErrorStudy global_error_study(const RknTableau& t, const OdeProblem& prob, double t_end,
                              std::span<const double> h_list, const StepConfig& cfg)
{
    if (h_list.size() < 2) {
        throw Error(ErrorCode::DegenerateFit, "convergence study needs at least two step sizes");
    }
    if (std::set<double>(h_list.begin(), h_list.end()).size() != h_list.size()) {
        throw Error(ErrorCode::DegenerateFit, "convergence study step sizes must be distinct");
    }
    for (double h : h_list) {
        (void)step_count(prob.t0, t_end, h);
    }

    const int dim = prob.dim;
    std::vector<double> q_ref(dim), p_ref(dim);
    ErrorStudy study;
    if (prob.has_exact()) {
        prob.exact(t_end, q_ref, p_ref);
        study.reference = "exact";
    } else {
        StepConfig ref_cfg = cfg;
        ref_cfg.h = *std::min_element(h_list.begin(), h_list.end()) / 20.0;
        ref_cfg.structure = StageStructure::Auto;
        const Trajectory ref =
            integrate(reference_tableau(), prob, t_end, ref_cfg, std::numeric_limits<int>::max());
        if (ref.failed) {
            throw StageDivergence("reference solution failed: " + ref.failure_message, NAN);
        }
        const auto last = ref.size() - 1;
        std::copy_n(ref.q_at(last).begin(), dim, q_ref.begin());
        std::copy_n(ref.p_at(last).begin(), dim, p_ref.begin());
        std::ostringstream os;
        os.precision(17);
        os << "order6 gauss-3 h=" << ref_cfg.h;
        study.reference = os.str();
    }

    std::vector<std::future<double>> cells;
    for (double h : h_list) {
        cells.push_back(std::async(std::launch::async, [&, h] {
            StepConfig c = cfg;
            c.h = h;
            const Trajectory tr = integrate(t, prob, t_end, c, std::numeric_limits<int>::max());
            if (tr.failed) {
                return std::numeric_limits<double>::quiet_NaN();
            }
            const auto last = tr.size() - 1;
            double err = 0.0;
            for (int k = 0; k < dim; ++k) {
                err = std::max(err, std::abs(tr.q_at(last)[k] - q_ref[k]));
                err = std::max(err, std::abs(tr.p_at(last)[k] - p_ref[k]));
            }
            return err;
        }));
    }

    std::vector<double> log_h, log_e;
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        const double err = cells[i].get();
        study.h.push_back(h_list[i]);
        study.error.push_back(err);
        if (std::isfinite(err) && err > 0.0) {
            log_h.push_back(std::log(h_list[i]));
            log_e.push_back(std::log(err));
        } else {
            study.any_failed = true;
        }
    }
    study.slope = log_h.size() >= 2 ? least_squares_slope(log_h, log_e)
                                    : std::numeric_limits<double>::quiet_NaN();
    return study;
}

DriftFit energy_drift(const Trajectory& traj)
{
    if (traj.energy_error.size() != traj.times.size() || traj.energy_error.empty()) {
        throw Error(ErrorCode::InvalidArgument, "trajectory carries no energy series");
    }
    DriftFit fit;
    fit.max_abs = max_norm(traj.energy_error);
    fit.slope = traj.size() >= 2 ? least_squares_slope(traj.times, traj.energy_error) : 0.0;
    return fit;
}

} // namespace csrkn
