#include "csrkn/cscoeff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "csrkn/error.hpp"
#include "csrkn/legendre.hpp"

namespace csrkn {

namespace {

std::string format_params(std::initializer_list<std::pair<const char*, double>> params)
{
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [name, v] : params) {
        os << (first ? "" : ",") << name << "=" << v;
        first = false;
    }
    return os.str();
}

Eigen::MatrixXd base_block(int rows, int cols)
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
    a(0, 0) = 1.0 / 6.0;
    a(0, 1) = -0.5 * xi(1);
    a(1, 0) = 0.5 * xi(1);
    return a;
}

void check_index(int i, int j)
{
    if (i < 0 || j < 0 || i > legendre::kMaxDegree || j > legendre::kMaxDegree) {
        throw Error(ErrorCode::DegreeOverflow, "coefficient index (" + std::to_string(i) + "," +
                                                   std::to_string(j) + ") exceeds degree " +
                                                   std::to_string(legendre::kMaxDegree));
    }
}

// Legendre coefficients of a polynomial given by monomial coefficients.
Eigen::VectorXd legendre_of_monomials(std::initializer_list<std::pair<int, double>> terms)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(legendre::kTransformDegree + 1);
    for (const auto& [power, coef] : terms) {
        out += coef * legendre::detail::monomial_coefficients(power);
    }
    return out;
}

double max_abs_difference(const Eigen::VectorXd& lhs, const Eigen::VectorXd& rhs)
{
    const Eigen::Index n = std::max(lhs.size(), rhs.size());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double l = k < lhs.size() ? lhs(k) : 0.0;
        const double r = k < rhs.size() ? rhs(k) : 0.0;
        worst = std::max(worst, std::abs(l - r));
    }
    return worst;
}

void check_moment_index(int n, const char* what)
{
    if (n < 1 || n - 1 > legendre::kMaxDegree) {
        throw Error(ErrorCode::DegreeOverflow,
                    std::string(what) + " index " + std::to_string(n) + " outside [1, " +
                        std::to_string(legendre::kMaxDegree + 1) + "]");
    }
}

// Residual of CN at one kappa. Integrating in sigma against sigma^(kappa-1)
// contracts the sigma index with the Legendre coefficients of that monomial.
double cn_residual(const AlphaMatrix& m, int kappa)
{
    const Eigen::VectorXd mono = legendre::detail::monomial_coefficients(kappa - 1);
    const Eigen::MatrixXd& a = m.coefficients();
    const Eigen::VectorXd lhs = a * mono.head(a.cols());
    const Eigen::VectorXd rhs =
        legendre_of_monomials({{kappa + 1, 1.0 / (kappa * (kappa + 1.0))}});
    return max_abs_difference(lhs, rhs);
}

double dn_residual(const AlphaMatrix& m, int kappa)
{
    const Eigen::VectorXd mono = legendre::detail::monomial_coefficients(kappa - 1);
    const Eigen::MatrixXd& a = m.coefficients();
    const Eigen::VectorXd lhs = a.transpose() * mono.head(a.rows());
    const Eigen::VectorXd rhs = legendre_of_monomials({{kappa + 1, 1.0 / (kappa * (kappa + 1.0))},
                                                       {1, -1.0 / kappa},
                                                       {0, 1.0 / (kappa + 1.0)}});
    return max_abs_difference(lhs, rhs);
}

template <typename Residual>
MomentCheck run_check(int upto, double tol, Residual residual)
{
    MomentCheck out;
    out.passed = true;
    for (int kappa = 1; kappa <= upto - 1; ++kappa) {
        const double r = residual(kappa);
        out.residuals.push_back(r);
        out.max_residual = std::max(out.max_residual, r);
        if (!(r < tol)) {
            out.passed = false;
        }
    }
    return out;
}

template <typename Residual>
int search_largest(Residual residual)
{
    int best = 1;
    for (int kappa = 1; kappa <= kSearchCap - 1; ++kappa) {
        if (!(residual(kappa) < kSearchTol)) {
            break;
        }
        best = kappa + 1;
    }
    return best;
}

} // namespace

AlphaMatrix::AlphaMatrix(Eigen::MatrixXd alpha, std::string label)
    : alpha_(std::move(alpha)), label_(std::move(label))
{
    if (alpha_.rows() < 1 || alpha_.cols() < 1) {
        throw Error(ErrorCode::InvalidArgument, "coefficient matrix must be non-empty");
    }
    if (deg_tau() > legendre::kMaxDegree || deg_sigma() > legendre::kMaxDegree) {
        throw Error(ErrorCode::DegreeOverflow, "coefficient matrix exceeds degree " +
                                                   std::to_string(legendre::kMaxDegree));
    }
}

double AlphaMatrix::at(int i, int j) const noexcept
{
    if (i < 0 || j < 0 || i > deg_tau() || j > deg_sigma()) {
        return 0.0;
    }
    return alpha_(i, j);
}

double AlphaMatrix::eval(double tau, double sigma) const
{
    std::array<double, legendre::kTransformDegree + 1> pt{};
    std::array<double, legendre::kTransformDegree + 1> ps{};
    legendre::eval_all(deg_tau(), tau, pt);
    legendre::eval_all(deg_sigma(), sigma, ps);
    double sum = 0.0;
    for (int i = 0; i <= deg_tau(); ++i) {
        double row = 0.0;
        for (int j = 0; j <= deg_sigma(); ++j) {
            row += alpha_(i, j) * ps[j];
        }
        sum += pt[i] * row;
    }
    return sum;
}

double xi(int k)
{
    return 1.0 / (2.0 * std::sqrt(4.0 * k * k - 1.0));
}

AlphaMatrix build_order2(double alpha)
{
    Eigen::MatrixXd a = base_block(2, 2);
    a(0, 0) = alpha;
    return {std::move(a), "order2(" + format_params({{"alpha", alpha}}) + ")"};
}

AlphaMatrix build_order4(double alpha, double beta, double gamma)
{
    Eigen::MatrixXd a = base_block(3, 3);
    a(1, 1) = alpha;
    a(0, 2) = beta;
    a(2, 0) = gamma;
    return {std::move(a), "order4(" +
                              format_params({{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}}) +
                              ")"};
}

AlphaMatrix build_order6(double alpha)
{
    // alpha(i,0) and alpha(0,i) for even i > 2 stay zero: the block is 3x3.
    Eigen::MatrixXd a = base_block(3, 3);
    a(1, 1) = -0.1;
    a(0, 2) = std::sqrt(5.0) / 60.0;
    a(2, 0) = std::sqrt(5.0) / 60.0;
    a(2, 2) = alpha;
    return {std::move(a), "order6(" + format_params({{"alpha", alpha}}) + ")"};
}

AlphaMatrix build_symmetric_general(const SparseCoefficients& extra)
{
    int rows = 2;
    int cols = 2;
    for (const auto& [idx, v] : extra) {
        const auto [i, j] = idx;
        check_index(i, j);
        if (i == 0 && j == 0) {
            continue;
        }
        if ((i + j) % 2 != 0 || i + j <= 1) {
            throw Error(ErrorCode::SymmetryViolation,
                        "entry (" + std::to_string(i) + "," + std::to_string(j) +
                            ") breaks the symmetric form: i+j must be even and > 1");
        }
        rows = std::max(rows, i + 1);
        cols = std::max(cols, j + 1);
    }
    Eigen::MatrixXd a = base_block(rows, cols);
    for (const auto& [idx, v] : extra) {
        a(idx.first, idx.second) = v;
    }
    return {std::move(a), "symmetric(" + std::to_string(extra.size()) + " free entries)"};
}

AlphaMatrix build_expansion(int eta, int zeta, const SparseCoefficients& omega)
{
    if (eta < 1 || zeta < 1) {
        throw Error(ErrorCode::InvalidArgument, "eta and zeta must be >= 1");
    }
    const int n1 = std::max(eta - 3, zeta - 1);
    const int n2 = std::max(eta - 2, zeta - 2);
    const int n3 = std::max(eta - 1, zeta - 3);

    SparseCoefficients entries;
    for (int k = 1; k <= n1; ++k) {
        entries[{k - 1, k + 1}] += xi(k) * xi(k + 1);
    }
    for (int k = 1; k <= n2; ++k) {
        entries[{k, k}] -= xi(k) * xi(k) + xi(k + 1) * xi(k + 1);
    }
    for (int k = 1; k <= n3; ++k) {
        entries[{k + 1, k - 1}] += xi(k) * xi(k + 1);
    }
    for (const auto& [idx, v] : omega) {
        const auto [i, j] = idx;
        if (i < zeta - 1 || j < eta - 1) {
            throw Error(ErrorCode::ExpansionConstraint,
                        "free coefficient (" + std::to_string(i) + "," + std::to_string(j) +
                            ") lies in the block fixed by the moment conditions");
        }
        entries[idx] += v;
    }

    int rows = 2;
    int cols = 2;
    for (const auto& [idx, v] : entries) {
        check_index(idx.first, idx.second);
        rows = std::max(rows, idx.first + 1);
        cols = std::max(cols, idx.second + 1);
    }
    Eigen::MatrixXd a = base_block(rows, cols);
    for (const auto& [idx, v] : entries) {
        a(idx.first, idx.second) += v;
    }
    return {std::move(a), "expansion(eta=" + std::to_string(eta) +
                              ",zeta=" + std::to_string(zeta) + ")"};
}

MomentCheck check_cn(const AlphaMatrix& m, int eta, double tol)
{
    check_moment_index(eta, "eta");
    return run_check(eta, tol, [&](int kappa) { return cn_residual(m, kappa); });
}

MomentCheck check_dn(const AlphaMatrix& m, int zeta, double tol)
{
    check_moment_index(zeta, "zeta");
    return run_check(zeta, tol, [&](int kappa) { return dn_residual(m, kappa); });
}

int largest_cn(const AlphaMatrix& m)
{
    return search_largest([&](int kappa) { return cn_residual(m, kappa); });
}

int largest_dn(const AlphaMatrix& m)
{
    return search_largest([&](int kappa) { return dn_residual(m, kappa); });
}

bool check_symmetry_cs(const AlphaMatrix& m, double tol)
{
    const double half_xi = 0.5 * xi(1);
    if (std::abs(m.at(0, 1) + half_xi) >= tol || std::abs(m.at(1, 0) - half_xi) >= tol) {
        return false;
    }
    for (int i = 0; i <= m.deg_tau(); ++i) {
        for (int j = 0; j <= m.deg_sigma(); ++j) {
            if ((i + j) % 2 == 1 && i + j > 1 && std::abs(m.at(i, j)) >= tol) {
                return false;
            }
        }
    }
    return true;
}

int order_estimate(const AlphaMatrix& m, int eta, int zeta, int p)
{
    const int a = std::min(eta, p - m.deg_sigma() + 1);
    const int b = std::min(zeta, p - m.deg_tau() + 1);
    return std::min({p, 2 * a + 2, a + b});
}

} // namespace csrkn
