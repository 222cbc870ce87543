#pragma once

#include <vector>

namespace csrkn {

enum class QuadratureKind { Gauss, Lobatto };

/// Interpolatory rule on [0,1]. Nodes strictly increasing, weights positive
/// and summing to one, symmetric about 1/2.
struct QuadratureRule {
    QuadratureKind kind = QuadratureKind::Gauss;
    int s = 0;
    std::vector<double> c;
    std::vector<double> b;
    int order = 0; ///< exact for x^(kappa-1), 1 <= kappa <= order
};

inline constexpr int kMaxQuadratureStages = 10;

/// Gauss-Legendre rule of order 2s, 1 <= s <= 10.
[[nodiscard]] QuadratureRule gauss_rule(int s);

/// Gauss-Lobatto rule of order 2s-2 including both endpoints, 2 <= s <= 10.
[[nodiscard]] QuadratureRule lobatto_rule(int s);

[[nodiscard]] QuadratureRule make_rule(QuadratureKind kind, int s);

/// sum_i b_i c_i^(kappa-1) - 1/kappa.
[[nodiscard]] double moment_residual(const QuadratureRule& rule, int kappa);

} // namespace csrkn
