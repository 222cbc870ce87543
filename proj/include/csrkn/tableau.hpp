#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "csrkn/cscoeff.hpp"
#include "csrkn/quadrature.hpp"

namespace csrkn {

/// s-stage RKN coefficients for q'' = f(t, q):
///
///   Q_i = q0 + h c_i p0 + h^2 sum_j a_bar(i,j) f(t0 + c_j h, Q_j)
///   q1  = q0 + h p0     + h^2 sum_i b_bar(i)   f(t0 + c_i h, Q_i)
///   p1  = p0            + h   sum_i b(i)       f(t0 + c_i h, Q_i)
struct RknTableau {
    Eigen::VectorXd c;
    Eigen::MatrixXd a_bar;
    Eigen::VectorXd b_bar;
    Eigen::VectorXd b;
    std::string label;

    [[nodiscard]] int stages() const noexcept { return static_cast<int>(c.size()); }

    /// Throws Error(InvalidArgument) on inconsistent sizes or non-finite entries.
    void validate() const;
};

/// a_bar(i,j) = b_j Abar(c_i, c_j), b_bar(i) = b_i (1 - c_i), c and b from the rule.
[[nodiscard]] RknTableau discretize(const AlphaMatrix& m, const QuadratureRule& rule);

enum class NamedMethod { RknIIIA, RknIIIB, Diagsymp, RknA, RknB };

/// Methods from Lobatto-3 discretizations of the order-4 family, stored as
/// rational literals. Construction cross-checks each against the parameter
/// substitution and throws if the two disagree beyond 1e-14.
[[nodiscard]] RknTableau named_tableau(NamedMethod name);

/// (alpha, beta, gamma) of build_order4 reproducing a named method.
struct Order4Params {
    double alpha;
    double beta;
    double gamma;
};
[[nodiscard]] Order4Params named_parameters(NamedMethod name);

/// CLI spelling: rkn-iiia, rkn-iiib, diagsymp, rkn-a, rkn-b.
[[nodiscard]] std::string_view method_name(NamedMethod name);
/// Throws Error(InvalidArgument) for unknown names.
[[nodiscard]] NamedMethod parse_method_name(std::string_view name);

/// c*_i = 1 - c_{s+1-i}, b*_i = b_{s+1-i}, b_bar*_i = b_{s+1-i} - b_bar_{s+1-i},
/// a_bar*_ij = b_{s+1-j}(1 - c_{s+1-i}) - b_bar_{s+1-j} + a_bar_{s+1-i,s+1-j}.
[[nodiscard]] RknTableau adjoint(const RknTableau& t);

struct PropertyVerdict {
    bool holds = false;
    double deviation = 0.0;
};

inline constexpr double kPropertyTol = 1e-12;

/// Max entrywise distance to the adjoint.
[[nodiscard]] PropertyVerdict is_symmetric(const RknTableau& t, double tol = kPropertyTol);

/// Classical RKN symplecticity conditions:
///   (i)  b_bar_i = b_i (1 - c_i)
///   (ii) b_i (b_bar_j - a_bar_ij) = b_j (b_bar_i - a_bar_ji)
[[nodiscard]] PropertyVerdict is_symplectic(const RknTableau& t, double tol = kPropertyTol);

struct SimplifyingOrders {
    int xi = 0;   ///< B(xi)
    int eta = 1;  ///< CN(eta)
    int zeta = 1; ///< DN(zeta)
};

/// Largest xi, eta, zeta (each capped at 13) with residuals below 1e-10.
[[nodiscard]] SimplifyingOrders check_simplifying_discrete(const RknTableau& t);

struct OrderBound {
    int bound = 0;
    /// False when b_bar_i = b_i (1 - c_i) fails; bound is then 0.
    bool bbar_consistent = false;
};

/// min(xi, 2 eta + 2, eta + zeta). A lower bound on the classical order only.
[[nodiscard]] OrderBound classical_order_bound(const RknTableau& t);

/// True when a_bar has no nonzero entry above the diagonal.
[[nodiscard]] bool is_lower_triangular(const RknTableau& t);

} // namespace csrkn
