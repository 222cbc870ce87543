#include "csrkn/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csrkn/error.hpp"

namespace csrkn {

namespace {

constexpr double kNamedCrossCheckTol = 1e-14;
constexpr double kSimplifyingTol = 1e-10;
constexpr int kSimplifyingCap = 13;

RknTableau lobatto3_tableau(const Eigen::Matrix3d& a_bar, std::string label)
{
    RknTableau t;
    t.c = Eigen::Vector3d(0.0, 0.5, 1.0);
    t.a_bar = a_bar;
    t.b_bar = Eigen::Vector3d(1.0 / 6.0, 1.0 / 3.0, 0.0);
    t.b = Eigen::Vector3d(1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0);
    t.label = std::move(label);
    return t;
}

RknTableau literal_tableau(NamedMethod name)
{
    Eigen::Matrix3d a;
    switch (name) {
    case NamedMethod::RknIIIA:
        a << 0.0, 0.0, 0.0,
             1.0 / 16.0, 1.0 / 12.0, -1.0 / 48.0,
             1.0 / 6.0, 1.0 / 3.0, 0.0;
        break;
    case NamedMethod::RknIIIB:
        a << 0.0, -1.0 / 12.0, 0.0,
             1.0 / 12.0, 1.0 / 12.0, 0.0,
             1.0 / 6.0, 1.0 / 4.0, 0.0;
        break;
    case NamedMethod::Diagsymp:
        a << 1.0 / 12.0, 0.0, 0.0,
             1.0 / 12.0, 0.0, 0.0,
             1.0 / 6.0, 1.0 / 3.0, 1.0 / 12.0;
        break;
    case NamedMethod::RknA:
        a << -1.0 / 360.0, -1.0 / 90.0, 1.0 / 72.0,
             49.0 / 720.0, 13.0 / 180.0, -11.0 / 720.0,
             13.0 / 72.0, 29.0 / 90.0, -1.0 / 360.0;
        break;
    case NamedMethod::RknB:
        a << -1.0 / 360.0, -11.0 / 180.0, 1.0 / 72.0,
             29.0 / 360.0, 13.0 / 180.0, -1.0 / 360.0,
             13.0 / 72.0, 49.0 / 180.0, -1.0 / 360.0;
        break;
    }
    return lobatto3_tableau(a, std::string(method_name(name)));
}

double max_abs_diff(const RknTableau& x, const RknTableau& y)
{
    double d = 0.0;
    d = std::max(d, (x.c - y.c).cwiseAbs().maxCoeff());
    d = std::max(d, (x.a_bar - y.a_bar).cwiseAbs().maxCoeff());
    d = std::max(d, (x.b_bar - y.b_bar).cwiseAbs().maxCoeff());
    d = std::max(d, (x.b - y.b).cwiseAbs().maxCoeff());
    return d;
}

// Number of leading kappa = 1, 2, ... that pass, at most `limit`.
template <typename Residual>
int passing_prefix(int limit, Residual residual)
{
    int count = 0;
    while (count < limit && residual(count + 1) < kSimplifyingTol) {
        ++count;
    }
    return count;
}

} // namespace

void RknTableau::validate() const
{
    const auto s = c.size();
    if (s < 1 || a_bar.rows() != s || a_bar.cols() != s || b_bar.size() != s || b.size() != s) {
        throw Error(ErrorCode::InvalidArgument, "tableau '" + label + "' has inconsistent sizes");
    }
    if (!c.allFinite() || !a_bar.allFinite() || !b_bar.allFinite() || !b.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "tableau '" + label + "' has non-finite entries");
    }
}

RknTableau discretize(const AlphaMatrix& m, const QuadratureRule& rule)
{
    const int s = rule.s;
    RknTableau t;
    t.c = Eigen::Map<const Eigen::VectorXd>(rule.c.data(), s);
    t.b = Eigen::Map<const Eigen::VectorXd>(rule.b.data(), s);
    t.a_bar.resize(s, s);
    t.b_bar.resize(s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            t.a_bar(i, j) = rule.b[j] * m.eval(rule.c[i], rule.c[j]);
        }
        t.b_bar(i) = rule.b[i] * (1.0 - rule.c[i]);
    }
    t.label = m.label() + (rule.kind == QuadratureKind::Gauss ? " gauss-" : " lobatto-") +
              std::to_string(s);
    return t;
}

Order4Params named_parameters(NamedMethod name)
{
    const double r5 = std::sqrt(5.0);
    switch (name) {
    case NamedMethod::RknIIIA:
        return {-1.0 / 12.0, 0.0, r5 / 60.0};
    case NamedMethod::RknIIIB:
        return {-1.0 / 12.0, r5 / 60.0, 0.0};
    case NamedMethod::Diagsymp:
        return {0.0, r5 / 30.0, r5 / 30.0};
    case NamedMethod::RknA:
        return {-0.1, r5 / 150.0, r5 / 60.0};
    case NamedMethod::RknB:
        return {-0.1, r5 / 60.0, r5 / 150.0};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method");
}

RknTableau named_tableau(NamedMethod name)
{
    RknTableau literal = literal_tableau(name);
    const auto [alpha, beta, gamma] = named_parameters(name);
    const RknTableau derived = discretize(build_order4(alpha, beta, gamma), lobatto_rule(3));
    const double d = max_abs_diff(literal, derived);
    if (!(d <= kNamedCrossCheckTol)) {
        std::ostringstream os;
        os << "tableau " << method_name(name) << " disagrees with its parameter substitution by "
           << d;
        throw Error(ErrorCode::InvalidArgument, os.str());
    }
    return literal;
}

std::string_view method_name(NamedMethod name)
{
    switch (name) {
    case NamedMethod::RknIIIA: return "rkn-iiia";
    case NamedMethod::RknIIIB: return "rkn-iiib";
    case NamedMethod::Diagsymp: return "diagsymp";
    case NamedMethod::RknA: return "rkn-a";
    case NamedMethod::RknB: return "rkn-b";
    }
    return "?";
}

NamedMethod parse_method_name(std::string_view name)
{
    for (auto m : {NamedMethod::RknIIIA, NamedMethod::RknIIIB, NamedMethod::Diagsymp,
                   NamedMethod::RknA, NamedMethod::RknB}) {
        if (method_name(m) == name) {
            return m;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

RknTableau adjoint(const RknTableau& t)
{
    t.validate();
    const int s = t.stages();
    RknTableau out;
    out.c.resize(s);
    out.b.resize(s);
    out.b_bar.resize(s);
    out.a_bar.resize(s, s);
    for (int i = 0; i < s; ++i) {
        const int ri = s - 1 - i;
        out.c(i) = 1.0 - t.c(ri);
        out.b(i) = t.b(ri);
        out.b_bar(i) = t.b(ri) - t.b_bar(ri);
        for (int j = 0; j < s; ++j) {
            const int rj = s - 1 - j;
            out.a_bar(i, j) = t.b(rj) * (1.0 - t.c(ri)) - t.b_bar(rj) + t.a_bar(ri, rj);
        }
    }
    out.label = "adjoint(" + t.label + ")";
    return out;
}

PropertyVerdict is_symmetric(const RknTableau& t, double tol)
{
    const double d = max_abs_diff(t, adjoint(t));
    return {d < tol, d};
}

PropertyVerdict is_symplectic(const RknTableau& t, double tol)
{
    t.validate();
    const int s = t.stages();
    double worst = 0.0;
    for (int i = 0; i < s; ++i) {
        worst = std::max(worst, std::abs(t.b_bar(i) - t.b(i) * (1.0 - t.c(i))));
        for (int j = 0; j < s; ++j) {
            const double lhs = t.b(i) * (t.b_bar(j) - t.a_bar(i, j));
            const double rhs = t.b(j) * (t.b_bar(i) - t.a_bar(j, i));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return {worst < tol, worst};
}

SimplifyingOrders check_simplifying_discrete(const RknTableau& t)
{
    t.validate();
    const int s = t.stages();
    auto powc = [&](int i, int e) { return std::pow(t.c(i), e); };

    SimplifyingOrders out;
    out.xi = passing_prefix(kSimplifyingCap, [&](int kappa) {
        double sum = 0.0;
        for (int i = 0; i < s; ++i) {
            sum += t.b(i) * powc(i, kappa - 1);
        }
        return std::abs(sum - 1.0 / kappa);
    });
    // CN(eta) and DN(zeta) constrain kappa <= eta-1, so they are one past the prefix.
    out.eta = 1 + passing_prefix(kSimplifyingCap - 1, [&](int kappa) {
        const double denom = kappa * (kappa + 1.0);
        double worst = 0.0;
        for (int i = 0; i < s; ++i) {
            double sum = 0.0;
            for (int j = 0; j < s; ++j) {
                sum += t.a_bar(i, j) * powc(j, kappa - 1);
            }
            worst = std::max(worst, std::abs(sum - powc(i, kappa + 1) / denom));
        }
        return worst;
    });

    out.zeta = 1 + passing_prefix(kSimplifyingCap - 1, [&](int kappa) {
        const double denom = kappa * (kappa + 1.0);
        double worst = 0.0;
        for (int j = 0; j < s; ++j) {
            double sum = 0.0;
            for (int i = 0; i < s; ++i) {
                sum += t.b(i) * powc(i, kappa - 1) * t.a_bar(i, j);
            }
            const double rhs = t.b(j) * powc(j, kappa + 1) / denom - t.b(j) * t.c(j) / kappa +
                               t.b(j) / (kappa + 1.0);
            worst = std::max(worst, std::abs(sum - rhs));
        }
        return worst;
    });
    return out;
}

OrderBound classical_order_bound(const RknTableau& t)
{
    t.validate();
    for (int i = 0; i < t.stages(); ++i) {
        if (!(std::abs(t.b_bar(i) - t.b(i) * (1.0 - t.c(i))) < kPropertyTol)) {
            return {0, false};
        }
    }
    const auto [xi_order, eta, zeta] = check_simplifying_discrete(t);
    return {std::min({xi_order, 2 * eta + 2, eta + zeta}), true};
}

bool is_lower_triangular(const RknTableau& t)
{
    for (int i = 0; i < t.stages(); ++i) {
        for (int j = i + 1; j < t.stages(); ++j) {
            if (t.a_bar(i, j) != 0.0) {
                return false;
            }
        }
    }
    return true;
}

} // namespace csrkn
