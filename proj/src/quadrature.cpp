#include "csrkn/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "csrkn/error.hpp"

namespace csrkn {

namespace {

constexpr double kNewtonTol = 1e-15;
constexpr int kNewtonMaxIter = 100;

// Unshifted Legendre L_n(y) and its derivative on [-1,1].
struct LegendreValue {
    double value;
    double derivative;
    double second; // L_n''(y), for Newton on L_{n}' (Lobatto interior)
};

LegendreValue legendre_on_interval(int n, double y)
{
    double prev = 1.0;
    double cur = y;
    if (n == 0) {
        return {1.0, 0.0, 0.0};
    }
    for (int k = 1; k < n; ++k) {
        const double next = ((2 * k + 1) * y * cur - k * prev) / (k + 1);
        prev = cur;
        cur = next;
    }
    // (1-y^2) L_n' = n (L_{n-1} - y L_n)
    // (1-y^2) L_n'' = 2y L_n' - n(n+1) L_n
    const double one_minus = 1.0 - y * y;
    const double d1 = n * (prev - y * cur) / one_minus;
    const double d2 = (2.0 * y * d1 - n * (n + 1) * cur) / one_minus;
    return {cur, d1, d2};
}

void check_stage_range(int s, int lo, const char* what)
{
    if (s < lo || s > kMaxQuadratureStages) {
        throw Error(ErrorCode::UnsupportedStageCount,
                    std::string(what) + " rule with " + std::to_string(s) +
                        " stages is not supported (range " + std::to_string(lo) + ".." +
                        std::to_string(kMaxQuadratureStages) + ")");
    }
}

// Pair node i with node s-1-i so the rule is symmetric to the last bit.
void symmetrize(QuadratureRule& rule)
{
    const int s = rule.s;
    for (int i = 0; i < s / 2; ++i) {
        const int j = s - 1 - i;
        const double c = 0.5 * (rule.c[i] + (1.0 - rule.c[j]));
        const double w = 0.5 * (rule.b[i] + rule.b[j]);
        rule.c[i] = c;
        rule.c[j] = 1.0 - c;
        rule.b[i] = w;
        rule.b[j] = w;
    }
    if (s % 2 == 1) {
        rule.c[s / 2] = 0.5;
    }
}

void normalize_weights(QuadratureRule& rule)
{
    double total = 0.0;
    for (double w : rule.b) {
        total += w;
    }
    for (double& w : rule.b) {
        w /= total;
    }
}

} // namespace

QuadratureRule gauss_rule(int s)
{
    check_stage_range(s, 1, "Gauss");
    QuadratureRule rule;
    rule.kind = QuadratureKind::Gauss;
    rule.s = s;
    rule.order = 2 * s;
    rule.c.resize(s);
    rule.b.resize(s);

    for (int i = 0; i < s; ++i) {
        // Chebyshev-type initial guess, ascending in y.
        double y = -std::cos(std::numbers::pi * (i + 0.75) / (s + 0.5));
        LegendreValue lv{};
        for (int it = 0; it < kNewtonMaxIter; ++it) {
            lv = legendre_on_interval(s, y);
            const double dy = lv.value / lv.derivative;
            y -= dy;
            if (std::abs(dy) < kNewtonTol) {
                break;
            }
        }
        lv = legendre_on_interval(s, y);
        rule.c[i] = 0.5 * (y + 1.0);
        // 2 / ((1-y^2) L_s'(y)^2) on [-1,1], halved for [0,1].
        rule.b[i] = 1.0 / ((1.0 - y * y) * lv.derivative * lv.derivative);
    }
    symmetrize(rule);
    normalize_weights(rule);
    return rule;
}

QuadratureRule lobatto_rule(int s)
{
    check_stage_range(s, 2, "Lobatto");
    QuadratureRule rule;
    rule.kind = QuadratureKind::Lobatto;
    rule.s = s;
    rule.order = 2 * s - 2;
    rule.c.resize(s);
    rule.b.resize(s);

    const int n = s - 1;
    const double end_weight = 1.0 / (s * (s - 1)); // 2/(s(s-1)) halved
    rule.c[0] = 0.0;
    rule.c[s - 1] = 1.0;
    rule.b[0] = end_weight;
    rule.b[s - 1] = end_weight;

    // Interior nodes: roots of L_n'. Guesses from the Chebyshev-Gauss-Lobatto points.
    for (int i = 1; i < s - 1; ++i) {
        double y = -std::cos(std::numbers::pi * i / n);
        LegendreValue lv{};
        for (int it = 0; it < kNewtonMaxIter; ++it) {
            lv = legendre_on_interval(n, y);
            const double dy = lv.derivative / lv.second;
            y -= dy;
            if (std::abs(dy) < kNewtonTol) {
                break;
            }
        }
        lv = legendre_on_interval(n, y);
        rule.c[i] = 0.5 * (y + 1.0);
        rule.b[i] = 1.0 / (s * (s - 1) * lv.value * lv.value);
    }
    symmetrize(rule);
    normalize_weights(rule);
    rule.c[0] = 0.0;
    rule.c[s - 1] = 1.0;
    return rule;
}

QuadratureRule make_rule(QuadratureKind kind, int s)
{
    return kind == QuadratureKind::Gauss ? gauss_rule(s) : lobatto_rule(s);
}

double moment_residual(const QuadratureRule& rule, int kappa)
{
    double sum = 0.0;
    for (int i = 0; i < rule.s; ++i) {
        sum += rule.b[i] * std::pow(rule.c[i], kappa - 1);
    }
    return sum - 1.0 / kappa;
}

} // namespace csrkn
