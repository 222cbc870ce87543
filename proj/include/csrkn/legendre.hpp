#pragma once

// Shifted, normalized Legendre polynomials on [0,1]:
//
//   P_0(x) = 1,  P_k(x) = sqrt(2k+1)/k! d^k/dx^k (x^2 - x)^k,
//
// so that int_0^1 P_j P_k dx = delta_jk and P_k(1) = sqrt(2k+1).

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace csrkn::legendre {

/// Largest degree accepted by the public evaluation routines.
inline constexpr int kMaxDegree = 12;

/// Degree of the internal basis transform. Two extra degrees let the
/// moment conditions test kappa up to 12, where x^(kappa+1) appears.
inline constexpr int kTransformDegree = kMaxDegree + 2;

/// P_k(x) by the three-term recurrence of the unshifted family at y = 2x-1.
/// Throws Error(DegreeOverflow) if k is negative or above kMaxDegree.
[[nodiscard]] double eval(int k, double x);

/// P_0(x) ... P_n(x). No range check beyond n <= kTransformDegree.
void eval_all(int n, double x, std::span<double> out);

/// Change of basis between monomials 1, x, ..., x^K and P_0 ... P_K.
///
/// to_legendre(k, n) = int_0^1 x^n P_k(x) dx, so column n holds the Legendre
/// coefficients of x^n. to_monomial(j, k) is the coefficient of x^j in P_k.
/// Both are upper triangular and filled from closed forms rather than by
/// inverting one another.
class MonomialLegendreTransform {
public:
    explicit MonomialLegendreTransform(int max_degree);

    [[nodiscard]] int max_degree() const noexcept { return max_degree_; }
    [[nodiscard]] const Eigen::MatrixXd& to_legendre() const noexcept { return to_legendre_; }
    [[nodiscard]] const Eigen::MatrixXd& to_monomial() const noexcept { return to_monomial_; }

    /// Shared instance built once at degree kTransformDegree.
    static const MonomialLegendreTransform& instance();

private:
    int max_degree_;
    Eigen::MatrixXd to_legendre_;
    Eigen::MatrixXd to_monomial_;
};

/// int_0^1 P_j P_k dx, evaluated in exact integer arithmetic over the
/// monomial expansions (the integer part of each coefficient is exact; only
/// the final sqrt((2j+1)(2k+1)) / lcm division rounds).
[[nodiscard]] double inner_product(int j, int k);

/// (P_k(1-x), (-1)^k P_k(x)).
[[nodiscard]] std::pair<double, double> reflect_parity_check(int k, double x);

/// Legendre coefficients m of x^(kappa-1) = sum_k m_k P_k(x). Length is
/// kMaxDegree+1; requires 1 <= kappa and kappa-1 <= kMaxDegree.
[[nodiscard]] std::vector<double> monomial_in_legendre(int kappa);

namespace detail {
/// Unchecked variant of monomial_in_legendre up to kTransformDegree, sized
/// kTransformDegree+1.
[[nodiscard]] Eigen::VectorXd monomial_coefficients(int power);
} // namespace detail

} // namespace csrkn::legendre
