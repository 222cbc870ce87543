#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace csrkn {

/// f(t, q) written into out. Must be reentrant: studies may call one force
/// function from several threads at once.
using ForceFn = std::function<void(double t, std::span<const double> q, std::span<double> out)>;
using EnergyFn = std::function<double(std::span<const double> p, std::span<const double> q)>;
using ExactFn = std::function<void(double t, std::span<double> q, std::span<double> p)>;

/// q'' = f(t, q), q(t0) = q0, q'(t0) = p0.
struct OdeProblem {
    std::string label;
    int dim = 0;
    ForceFn force;
    double t0 = 0.0;
    std::vector<double> q0;
    std::vector<double> p0;
    EnergyFn energy; ///< empty when the problem has no energy
    ExactFn exact;   ///< empty when no closed-form solution is known
    bool reversible = false;

    [[nodiscard]] bool has_energy() const noexcept { return static_cast<bool>(energy); }
    [[nodiscard]] bool has_exact() const noexcept { return static_cast<bool>(exact); }
};

/// q'' = -sin q - (2/5) cos 2q, q0 = 0, p0 = 2.5,
/// H = p^2/2 - cos q + (1/5) sin 2q.
[[nodiscard]] OdeProblem perturbed_pendulum();

/// q'' = -omega^2 q with (q0, p0) = (1, 0) unless given.
[[nodiscard]] OdeProblem harmonic_oscillator(double omega, double q0 = 1.0, double p0 = 0.0);

/// Planar Kepler problem started at pericentre with semi-major axis 1.
[[nodiscard]] OdeProblem kepler_2d(double eccentricity);

/// Problems by CLI name: pendulum, harmonic (omega = 1), kepler (e = 0.6).
[[nodiscard]] OdeProblem problem_by_name(const std::string& name);

} // namespace csrkn
