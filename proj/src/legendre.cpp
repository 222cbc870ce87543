#include "csrkn/legendre.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "csrkn/error.hpp"

namespace csrkn::legendre {

namespace {

__extension__ using wide_int = __int128;

void check_degree(int k, int limit)
{
    if (k < 0 || k > limit) {
        throw Error(ErrorCode::DegreeOverflow,
                    "Legendre degree " + std::to_string(k) + " outside [0, " +
                        std::to_string(limit) + "]");
    }
}

std::int64_t binomial_int(int n, int k)
{
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

// Integer coefficient of x^j in P_k / sqrt(2k+1).
std::int64_t shifted_coefficient(int k, int j)
{
    const std::int64_t mag = binomial_int(k, j) * binomial_int(k + j, j);
    return ((k + j) % 2 == 0) ? mag : -mag;
}

} // namespace

double eval(int k, double x)
{
    check_degree(k, kMaxDegree);
    const double y = 2.0 * x - 1.0;
    double prev = 1.0;
    if (k == 0) {
        return 1.0;
    }
    double cur = y;
    for (int n = 1; n < k; ++n) {
        const double next = ((2 * n + 1) * y * cur - n * prev) / (n + 1);
        prev = cur;
        cur = next;
    }
    return std::sqrt(2.0 * k + 1.0) * cur;
}

void eval_all(int n, double x, std::span<double> out)
{
    check_degree(n, kTransformDegree);
    const double y = 2.0 * x - 1.0;
    double prev = 1.0;
    double cur = y;
    out[0] = 1.0;
    if (n >= 1) {
        out[1] = std::sqrt(3.0) * y;
    }
    for (int k = 1; k < n; ++k) {
        const double next = ((2 * k + 1) * y * cur - k * prev) / (k + 1);
        prev = cur;
        cur = next;
        out[k + 1] = std::sqrt(2.0 * (k + 1) + 1.0) * cur;
    }
}

MonomialLegendreTransform::MonomialLegendreTransform(int max_degree)
    : max_degree_(max_degree),
      to_legendre_(Eigen::MatrixXd::Zero(max_degree + 1, max_degree + 1)),
      to_monomial_(Eigen::MatrixXd::Zero(max_degree + 1, max_degree + 1))
{
    check_degree(max_degree, kTransformDegree);
    for (int k = 0; k <= max_degree; ++k) {
        const double norm = std::sqrt(2.0 * k + 1.0);
        for (int j = 0; j <= k; ++j) {
            to_monomial_(j, k) = norm * static_cast<double>(shifted_coefficient(k, j));
        }
    }
    // int_0^1 x^n P~_k(x) dx = (n!)^2 / ((n-k)! (n+k+1)!) for the unnormalized
    // shifted family P~_k(1) = 1, written as a product of ratios to stay in range.
    for (int n = 0; n <= max_degree; ++n) {
        for (int k = 0; k <= n; ++k) {
            double v = 1.0 / (n + k + 1);
            for (int i = 0; i < k; ++i) {
                v *= static_cast<double>(n - i) / (n + k - i);
            }
            to_legendre_(k, n) = std::sqrt(2.0 * k + 1.0) * v;
        }
    }
}

const MonomialLegendreTransform& MonomialLegendreTransform::instance()
{
    static const MonomialLegendreTransform shared(kTransformDegree);
    return shared;
}

double inner_product(int j, int k)
{
    check_degree(j, kMaxDegree);
    check_degree(k, kMaxDegree);

    std::int64_t lcm = 1;
    for (int d = 2; d <= j + k + 1; ++d) {
        lcm = std::lcm(lcm, static_cast<std::int64_t>(d));
    }
    wide_int acc = 0;
    for (int a = 0; a <= j; ++a) {
        for (int b = 0; b <= k; ++b) {
            const wide_int term = static_cast<wide_int>(shifted_coefficient(j, a)) *
                                  shifted_coefficient(k, b);
            acc += term * (lcm / (a + b + 1));
        }
    }
    const long double ratio = static_cast<long double>(acc) / static_cast<long double>(lcm);
    return static_cast<double>(std::sqrt(static_cast<long double>((2 * j + 1) * (2 * k + 1))) *
                               ratio);
}

std::pair<double, double> reflect_parity_check(int k, double x)
{
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return {eval(k, 1.0 - x), sign * eval(k, x)};
}

std::vector<double> monomial_in_legendre(int kappa)
{
    check_degree(kappa - 1, kMaxDegree);
    const auto& col = MonomialLegendreTransform::instance().to_legendre().col(kappa - 1);
    return {col.data(), col.data() + kMaxDegree + 1};
}

namespace detail {

Eigen::VectorXd monomial_coefficients(int power)
{
    check_degree(power, kTransformDegree);
    return MonomialLegendreTransform::instance().to_legendre().col(power);
}

} // namespace detail

} // namespace csrkn::legendre
