#include <cmath>

#include <doctest.h>

#include "csrkn/error.hpp"
#include "csrkn/quadrature.hpp"
#include "oracle.hpp"

using csrkn::QuadratureKind;
using csrkn::QuadratureRule;

namespace {

void check_nodes(const QuadratureRule& r, std::vector<double> c, std::vector<double> b)
{
    REQUIRE(r.c.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(std::abs(r.c[i] - c[i]) < 1e-14);
        CHECK(std::abs(r.b[i] - b[i]) < 1e-14);
    }
}

double factorial(int n)
{
    return std::tgamma(n + 1.0);
}

// sum b_i c_i^p - 1/(p+1) at p = order for the s-point rule on [0,1].
double first_error(QuadratureKind kind, int s)
{
    if (kind == QuadratureKind::Gauss) {
        return -std::pow(factorial(s), 4) / ((2 * s + 1) * std::pow(factorial(2 * s), 2));
    }
    return s * std::pow(s - 1.0, 3) * std::pow(factorial(s - 2), 4) /
           ((2 * s - 1) * std::pow(factorial(2 * s - 2), 2));
}

void check_invariants(const QuadratureRule& r)
{
    const int s = r.s;
    double sum = 0.0;
    for (int i = 0; i < s; ++i) {
        sum += r.b[i];
        CHECK(r.b[i] > 0.0);
        CHECK(r.c[i] >= 0.0);
        CHECK(r.c[i] <= 1.0);
        if (i > 0) {
            CHECK(r.c[i] > r.c[i - 1]);
        }
        CHECK(std::abs(r.c[s - 1 - i] - (1.0 - r.c[i])) < 1e-14);
        CHECK(std::abs(r.b[s - 1 - i] - r.b[i]) < 1e-14);
    }
    CHECK(std::abs(sum - 1.0) < 1e-14);
    for (int kappa = 1; kappa <= r.order; ++kappa) {
        CHECK(std::abs(csrkn::moment_residual(r, kappa)) < 1e-12);
    }
    // First inexact moment: the classical error constants of each rule.
    CHECK(csrkn::moment_residual(r, r.order + 1) ==
          doctest::Approx(first_error(r.kind, s)).epsilon(1e-6));
}

} // namespace

TEST_CASE("gauss closed forms")
{
    const double r3 = std::sqrt(3.0);
    const double r15 = std::sqrt(15.0);
    check_nodes(csrkn::gauss_rule(1), {0.5}, {1.0});
    check_nodes(csrkn::gauss_rule(2), {(3 - r3) / 6, (3 + r3) / 6}, {0.5, 0.5});
    check_nodes(csrkn::gauss_rule(3), {(5 - r15) / 10, 0.5, (5 + r15) / 10},
                {5.0 / 18, 4.0 / 9, 5.0 / 18});
}

TEST_CASE("lobatto closed forms")
{
    const double r5 = std::sqrt(5.0);
    check_nodes(csrkn::lobatto_rule(2), {0.0, 1.0}, {0.5, 0.5});
    check_nodes(csrkn::lobatto_rule(3), {0.0, 0.5, 1.0}, {1.0 / 6, 2.0 / 3, 1.0 / 6});
    check_nodes(csrkn::lobatto_rule(4), {0.0, (5 - r5) / 10, (5 + r5) / 10, 1.0},
                {1.0 / 12, 5.0 / 12, 5.0 / 12, 1.0 / 12});
}

TEST_CASE("rules satisfy their invariants for every supported size")
{
    for (int s = 1; s <= csrkn::kMaxQuadratureStages; ++s) {
        CAPTURE(s);
        const auto g = csrkn::gauss_rule(s);
        CHECK(g.kind == QuadratureKind::Gauss);
        CHECK(g.order == 2 * s);
        check_invariants(g);
        if (s >= 2) {
            const auto l = csrkn::lobatto_rule(s);
            CHECK(l.kind == QuadratureKind::Lobatto);
            CHECK(l.order == 2 * s - 2);
            CHECK(l.c.front() == 0.0);
            CHECK(l.c.back() == 1.0);
            check_invariants(l);
        }
    }
}

TEST_CASE("gauss nodes agree with Golub-Welsch")
{
    for (int s = 1; s <= csrkn::kMaxQuadratureStages; ++s) {
        const auto g = csrkn::gauss_rule(s);
        const auto ref = oracle::golub_welsch(s);
        for (int i = 0; i < s; ++i) {
            CHECK(std::abs(g.c[i] - ref.x[i]) < 1e-13);
            CHECK(std::abs(g.b[i] - ref.w[i]) < 1e-13);
        }
    }
}

TEST_CASE("rules are deterministic")
{
    for (int s = 2; s <= csrkn::kMaxQuadratureStages; ++s) {
        const auto a = csrkn::lobatto_rule(s);
        const auto b = csrkn::lobatto_rule(s);
        CHECK(a.c == b.c);
        CHECK(a.b == b.b);
        CHECK(csrkn::gauss_rule(s).c == csrkn::gauss_rule(s).c);
    }
}

TEST_CASE("unsupported stage counts")
{
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const csrkn::Error& e) {
            return e.code();
        }
        return csrkn::ErrorCode::Io;
    };
    CHECK(code_of([] { (void)csrkn::gauss_rule(0); }) == csrkn::ErrorCode::UnsupportedStageCount);
    CHECK(code_of([] { (void)csrkn::gauss_rule(11); }) ==
          csrkn::ErrorCode::UnsupportedStageCount);
    CHECK(code_of([] { (void)csrkn::lobatto_rule(1); }) ==
          csrkn::ErrorCode::UnsupportedStageCount);
    CHECK(code_of([] { (void)csrkn::make_rule(QuadratureKind::Lobatto, 11); }) ==
          csrkn::ErrorCode::UnsupportedStageCount);
}
