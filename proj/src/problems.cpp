#include "csrkn/problems.hpp"

#include <cmath>

#include "csrkn/error.hpp"

namespace csrkn {

OdeProblem perturbed_pendulum()
{
    OdeProblem p;
    p.label = "pendulum";
    p.dim = 1;
    p.force = [](double, std::span<const double> q, std::span<double> out) {
        out[0] = -std::sin(q[0]) - 0.4 * std::cos(2.0 * q[0]);
    };
    p.t0 = 0.0;
    p.q0 = {0.0};
    p.p0 = {2.5};
    p.energy = [](std::span<const double> v, std::span<const double> q) {
        return 0.5 * v[0] * v[0] - std::cos(q[0]) + 0.2 * std::sin(2.0 * q[0]);
    };
    p.reversible = true;
    return p;
}

OdeProblem harmonic_oscillator(double omega, double q0, double p0)
{
    if (!(omega > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "harmonic oscillator needs omega > 0");
    }
    OdeProblem p;
    p.label = "harmonic";
    p.dim = 1;
    const double w2 = omega * omega;
    p.force = [w2](double, std::span<const double> q, std::span<double> out) {
        out[0] = -w2 * q[0];
    };
    p.t0 = 0.0;
    p.q0 = {q0};
    p.p0 = {p0};
    p.energy = [w2](std::span<const double> v, std::span<const double> q) {
        return 0.5 * v[0] * v[0] + 0.5 * w2 * q[0] * q[0];
    };
    p.exact = [omega, q0, p0](double t, std::span<double> q, std::span<double> v) {
        const double c = std::cos(omega * t);
        const double s = std::sin(omega * t);
        q[0] = q0 * c + (p0 / omega) * s;
        v[0] = -q0 * omega * s + p0 * c;
    };
    p.reversible = true;
    return p;
}

OdeProblem kepler_2d(double eccentricity)
{
    if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "Kepler eccentricity must lie in [0, 1)");
    }
    const double e = eccentricity;
    OdeProblem p;
    p.label = "kepler";
    p.dim = 2;
    p.force = [](double, std::span<const double> q, std::span<double> out) {
        const double r2 = q[0] * q[0] + q[1] * q[1];
        const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
        out[0] = -q[0] * inv_r3;
        out[1] = -q[1] * inv_r3;
    };
    p.t0 = 0.0;
    p.q0 = {1.0 - e, 0.0};
    p.p0 = {0.0, std::sqrt((1.0 + e) / (1.0 - e))};
    p.energy = [](std::span<const double> v, std::span<const double> q) {
        return 0.5 * (v[0] * v[0] + v[1] * v[1]) - 1.0 / std::hypot(q[0], q[1]);
    };
    p.reversible = true;
    return p;
}

OdeProblem problem_by_name(const std::string& name)
{
    if (name == "pendulum") {
        return perturbed_pendulum();
    }
    if (name == "harmonic") {
        return harmonic_oscillator(1.0);
    }
    if (name == "kepler") {
        return kepler_2d(0.6);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown problem '" + name + "'");
}

} // namespace csrkn
