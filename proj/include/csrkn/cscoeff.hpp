#pragma once

// Continuous-stage coefficient functions written as finite Legendre double
// series
//
//   Abar(tau, sigma) = sum_{i<=M, j<=N} alpha(i,j) P_i(tau) P_j(sigma),
//
// with the companions fixed to B(tau) = 1, C(tau) = tau, Bbar(tau) = 1 - tau.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace csrkn {

/// Immutable coefficient matrix alpha(i, j); row index pairs with tau.
class AlphaMatrix {
public:
    AlphaMatrix(Eigen::MatrixXd alpha, std::string label);

    [[nodiscard]] int deg_tau() const noexcept { return static_cast<int>(alpha_.rows()) - 1; }
    [[nodiscard]] int deg_sigma() const noexcept { return static_cast<int>(alpha_.cols()) - 1; }
    [[nodiscard]] const Eigen::MatrixXd& coefficients() const noexcept { return alpha_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// alpha(i, j), zero outside the stored block.
    [[nodiscard]] double at(int i, int j) const noexcept;

    [[nodiscard]] double eval(double tau, double sigma) const;

private:
    Eigen::MatrixXd alpha_;
    std::string label_;
};

using SparseCoefficients = std::map<std::pair<int, int>, double>;

/// xi_k = 1 / (2 sqrt(4k^2 - 1)); tau = P_0/2 + xi_1 P_1(tau).
[[nodiscard]] double xi(int k);

[[nodiscard]] AlphaMatrix build_order2(double alpha);
[[nodiscard]] AlphaMatrix build_order4(double alpha, double beta, double gamma);
/// alpha(1,1) = -1/10, alpha(0,2) = alpha(2,0) = sqrt(5)/60, alpha(2,2) = alpha.
[[nodiscard]] AlphaMatrix build_order6(double alpha);

/// Symmetric family: alpha(0,1) = -xi_1/2, alpha(1,0) = xi_1/2, alpha(0,0)
/// defaults to 1/6, plus the supplied entries, each of which must have i+j
/// even and i+j > 1 (or be (0,0)).
[[nodiscard]] AlphaMatrix build_symmetric_general(const SparseCoefficients& extra);

/// The Legendre form equivalent to CN(eta) and DN(zeta), plus free terms
/// omega(i,j) restricted to i >= zeta-1, j >= eta-1.
[[nodiscard]] AlphaMatrix build_expansion(int eta, int zeta, const SparseCoefficients& omega);

struct MomentCheck {
    bool passed = false;
    double max_residual = 0.0;
    /// residuals[kappa-1] is the max Legendre-coefficient residual at kappa.
    std::vector<double> residuals;
};

inline constexpr double kContinuousCheckTol = 1e-12;
inline constexpr double kSearchTol = 1e-10;
inline constexpr int kSearchCap = 13;

/// int_0^1 Abar(tau,s) s^(kappa-1) ds = tau^(kappa+1)/(kappa(kappa+1)),
/// 1 <= kappa <= eta-1, compared in Legendre coefficient space.
[[nodiscard]] MomentCheck check_cn(const AlphaMatrix& m, int eta,
                                   double tol = kContinuousCheckTol);

/// int_0^1 t^(kappa-1) Abar(t,sigma) dt =
///   sigma^(kappa+1)/(kappa(kappa+1)) - sigma/kappa + 1/(kappa+1).
[[nodiscard]] MomentCheck check_dn(const AlphaMatrix& m, int zeta,
                                   double tol = kContinuousCheckTol);

/// Largest eta (resp. zeta) whose conditions hold below kSearchTol, capped at 13.
[[nodiscard]] int largest_cn(const AlphaMatrix& m);
[[nodiscard]] int largest_dn(const AlphaMatrix& m);

/// Abar(tau,sigma) - Abar(1-tau,1-sigma) = tau - sigma, checked on the
/// coefficients.
[[nodiscard]] bool check_symmetry_cs(const AlphaMatrix& m, double tol = 1e-13);

/// min(p, 2a+2, a+b), a = min(eta, p - deg_sigma + 1), b = min(zeta, p - deg_tau + 1).
[[nodiscard]] int order_estimate(const AlphaMatrix& m, int eta, int zeta, int p);

} // namespace csrkn
