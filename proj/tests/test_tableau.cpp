#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>

#include "csrkn/error.hpp"
#include "csrkn/tableau.hpp"
#include "csrkn/tableau_io.hpp"
#include "oracle.hpp"

using csrkn::NamedMethod;
using csrkn::RknTableau;

namespace {

const double kR3 = std::sqrt(3.0);
const double kR5 = std::sqrt(5.0);

double max_diff(const RknTableau& x, const RknTableau& y)
{
    double d = (x.c - y.c).cwiseAbs().maxCoeff();
    d = std::max(d, (x.a_bar - y.a_bar).cwiseAbs().maxCoeff());
    d = std::max(d, (x.b_bar - y.b_bar).cwiseAbs().maxCoeff());
    return std::max(d, (x.b - y.b).cwiseAbs().maxCoeff());
}

RknTableau make(Eigen::VectorXd c, Eigen::MatrixXd a, Eigen::VectorXd bb, Eigen::VectorXd b)
{
    RknTableau t;
    t.c = std::move(c);
    t.a_bar = std::move(a);
    t.b_bar = std::move(bb);
    t.b = std::move(b);
    t.label = "test";
    return t;
}

RknTableau euler_like()
{
    return make(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1),
                Eigen::VectorXd::Ones(1));
}

RknTableau random_tableau(std::mt19937& rng, int s)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RknTableau t;
    t.c = Eigen::VectorXd::NullaryExpr(s, [&] { return u(rng); });
    t.a_bar = Eigen::MatrixXd::NullaryExpr(s, s, [&] { return u(rng); });
    t.b_bar = Eigen::VectorXd::NullaryExpr(s, [&] { return u(rng); });
    t.b = Eigen::VectorXd::NullaryExpr(s, [&] { return u(rng); });
    return t;
}

// Lobatto-3 discretization of the order-4 family from the hand-written
// polynomial, with the rule entered by hand.
RknTableau lobatto3_oracle(double a, double b, double g)
{
    const double c[3] = {0.0, 0.5, 1.0};
    const double w[3] = {1.0 / 6, 2.0 / 3, 1.0 / 6};
    RknTableau t;
    t.c = Eigen::Vector3d(0.0, 0.5, 1.0);
    t.b = Eigen::Vector3d(w[0], w[1], w[2]);
    t.b_bar = Eigen::Vector3d(w[0], w[1] * 0.5, 0.0);
    t.a_bar.resize(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            t.a_bar(i, j) = w[j] * oracle::order4_abar(a, b, g, c[i], c[j]);
        }
    }
    return t;
}

} // namespace

TEST_CASE("discretize produces the quadrature tableau")
{
    const auto t1 = csrkn::discretize(csrkn::build_order2(0.3), csrkn::gauss_rule(1));
    CHECK(t1.stages() == 1);
    CHECK(t1.c(0) == doctest::Approx(0.5));
    CHECK(t1.a_bar(0, 0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(t1.b_bar(0) == doctest::Approx(0.5));
    CHECK(t1.b(0) == doctest::Approx(1.0));

    for (double a : {-0.3, 0.0, 0.25}) {
        const auto t2 = csrkn::discretize(csrkn::build_order4(a, 0.1, -0.2), csrkn::gauss_rule(2));
        CHECK(t2.a_bar(0, 0) == doctest::Approx((1 + 6 * a) / 12).epsilon(1e-14));
    }

    const auto iiia = csrkn::discretize(csrkn::build_order4(-1.0 / 12, 0.0, kR5 / 60),
                                        csrkn::lobatto_rule(3));
    CHECK(iiia.a_bar(1, 0) == doctest::Approx(1.0 / 16).epsilon(1e-14));
    CHECK(iiia.a_bar(1, 1) == doctest::Approx(1.0 / 12).epsilon(1e-14));
    CHECK(iiia.a_bar(1, 2) == doctest::Approx(-1.0 / 48).epsilon(1e-14));

    const auto six = csrkn::discretize(csrkn::build_order6(0.0), csrkn::gauss_rule(3));
    CHECK(six.a_bar(0, 0) == doctest::Approx(2.0 / 135).epsilon(1e-13));
}

TEST_CASE("Lobatto-3 discretization agrees with the hand-written oracle")
{
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int n = 0; n < 20; ++n) {
        const double a = u(rng), b = u(rng), g = u(rng);
        const auto t = csrkn::discretize(csrkn::build_order4(a, b, g), csrkn::lobatto_rule(3));
        CHECK(max_diff(t, lobatto3_oracle(a, b, g)) < 1e-13);
    }
}

TEST_CASE("named tableaus")
{
    const auto iiib = csrkn::named_tableau(NamedMethod::RknIIIB);
    CHECK(iiib.a_bar(0, 0) == 0.0);
    CHECK(iiib.a_bar(0, 1) == doctest::Approx(-1.0 / 12));
    CHECK(iiib.a_bar(0, 2) == 0.0);
    CHECK(iiib.b_bar(0) == doctest::Approx(1.0 / 6));
    CHECK(iiib.b_bar(1) == doctest::Approx(1.0 / 3));
    CHECK(iiib.b_bar(2) == 0.0);
    CHECK(iiib.b(1) == doctest::Approx(2.0 / 3));

    const auto a = csrkn::named_tableau(NamedMethod::RknA);
    CHECK(a.a_bar(0, 0) == doctest::Approx(-1.0 / 360));
    CHECK(a.a_bar(1, 1) == doctest::Approx(13.0 / 180));
    CHECK(a.a_bar(2, 2) == doctest::Approx(-1.0 / 360));

    for (auto m : {NamedMethod::RknIIIA, NamedMethod::RknIIIB, NamedMethod::Diagsymp,
                   NamedMethod::RknA, NamedMethod::RknB}) {
        CAPTURE(csrkn::method_name(m));
        const auto t = csrkn::named_tableau(m);
        const auto [al, be, ga] = csrkn::named_parameters(m);
        CHECK(max_diff(t, lobatto3_oracle(al, be, ga)) < 1e-14);
        CHECK(csrkn::parse_method_name(csrkn::method_name(m)) == m);
        CHECK(t.label == csrkn::method_name(m));
    }
    const auto d = csrkn::named_parameters(NamedMethod::Diagsymp);
    CHECK(d.alpha == 0.0);
    CHECK(d.beta == doctest::Approx(kR5 / 30));
    CHECK(d.gamma == doctest::Approx(kR5 / 30));
    CHECK_THROWS_AS((void)csrkn::parse_method_name("rkn-c"), csrkn::Error);
}

TEST_CASE("adjoint")
{
    std::mt19937 rng(19);
    for (int s = 1; s <= 5; ++s) {
        const auto t = random_tableau(rng, s);
        CHECK(max_diff(csrkn::adjoint(csrkn::adjoint(t)), t) < 1e-14);
    }
    const auto d = csrkn::named_tableau(NamedMethod::Diagsymp);
    CHECK(max_diff(csrkn::adjoint(d), d) < 1e-15);

    const auto e = csrkn::adjoint(euler_like());
    CHECK(e.c(0) == 1.0);
    CHECK(e.b_bar(0) == 0.0);
    CHECK(e.a_bar(0, 0) == 0.0);
    CHECK(e.b(0) == 1.0);
}

TEST_CASE("symmetry verifier")
{
    for (auto m : {NamedMethod::RknIIIA, NamedMethod::RknIIIB, NamedMethod::Diagsymp,
                   NamedMethod::RknA, NamedMethod::RknB}) {
        CHECK(csrkn::is_symmetric(csrkn::named_tableau(m)).holds);
    }
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < 10; ++n) {
        const auto t = csrkn::discretize(csrkn::build_order4(u(rng), u(rng), u(rng)),
                                         csrkn::lobatto_rule(3));
        CHECK(csrkn::is_symmetric(t).holds);
    }
    auto bad = csrkn::named_tableau(NamedMethod::RknIIIB);
    bad.a_bar(0, 1) += 1e-6;
    const auto v = csrkn::is_symmetric(bad);
    CHECK_FALSE(v.holds);
    CHECK(v.deviation == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK_FALSE(csrkn::is_symmetric(euler_like()).holds);
}

TEST_CASE("symplecticity verifier")
{
    CHECK(csrkn::is_symplectic(csrkn::named_tableau(NamedMethod::Diagsymp)).holds);
    CHECK_FALSE(csrkn::is_symplectic(csrkn::named_tableau(NamedMethod::RknB)).holds);
    CHECK_FALSE(csrkn::is_symplectic(csrkn::named_tableau(NamedMethod::RknA)).holds);
    // Lobatto IIIA/IIIB as single RKN methods are not symplectic; only the
    // partitioned pair is.
    const auto iiib = csrkn::is_symplectic(csrkn::named_tableau(NamedMethod::RknIIIB));
    CHECK_FALSE(iiib.holds);
    CHECK(iiib.deviation == doctest::Approx(1.0 / 72).epsilon(1e-12));
    CHECK_FALSE(csrkn::is_symplectic(csrkn::named_tableau(NamedMethod::RknIIIA)).holds);

    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int n = 0; n < 10; ++n) {
        const double a = u(rng), b = u(rng);
        CHECK(csrkn::is_symplectic(
                  csrkn::discretize(csrkn::build_order4(a, b, b), csrkn::lobatto_rule(3)))
                  .holds);
        CHECK_FALSE(csrkn::is_symplectic(csrkn::discretize(csrkn::build_order4(a, b, b + 0.01),
                                                           csrkn::lobatto_rule(3)))
                        .holds);
    }
    for (int s = 1; s <= 4; ++s) {
        CHECK(csrkn::is_symplectic(csrkn::discretize(csrkn::build_order6(0.0), csrkn::gauss_rule(s)))
                  .holds);
    }
}

TEST_CASE("discrete simplifying assumptions and order bound")
{
    const auto six = csrkn::discretize(csrkn::build_order6(0.0), csrkn::gauss_rule(3));
    const auto o = csrkn::check_simplifying_discrete(six);
    CHECK(o.xi == 6);
    CHECK(o.eta >= 3);
    CHECK(o.zeta >= 3);
    CHECK(csrkn::classical_order_bound(six).bound >= 6);

    CHECK(csrkn::check_simplifying_discrete(csrkn::named_tableau(NamedMethod::RknIIIB)).xi == 4);

    const auto mid = csrkn::discretize(csrkn::build_order2(1.0 / 6), csrkn::gauss_rule(1));
    CHECK(csrkn::check_simplifying_discrete(mid).xi == 2);
    CHECK(csrkn::classical_order_bound(mid).bound >= 2);

    const auto g2 = csrkn::discretize(csrkn::build_order4(0.1, 0.2, 0.3), csrkn::gauss_rule(2));
    CHECK(csrkn::classical_order_bound(g2).bound >= 4);

    // The bound is a lower bound only; for these Lobatto members the
    // simplifying assumptions do not reach order 4.
    const auto iiia = csrkn::classical_order_bound(csrkn::named_tableau(NamedMethod::RknIIIA));
    CHECK(iiia.bbar_consistent);
    CHECK(iiia.bound == 4);
    CHECK(csrkn::classical_order_bound(csrkn::named_tableau(NamedMethod::Diagsymp)).bound == 2);
    CHECK(csrkn::classical_order_bound(csrkn::named_tableau(NamedMethod::RknA)).bound == 3);

    auto broken = mid;
    broken.b_bar(0) = 0.4;
    const auto b = csrkn::classical_order_bound(broken);
    CHECK_FALSE(b.bbar_consistent);
    CHECK(b.bound == 0);
}

TEST_CASE("discrete conditions agree with direct summation")
{
    // eta from CN: sum_j a_bar_ij c_j^(k-1) = c_i^(k+1) / (k (k+1)).
    const auto t = csrkn::named_tableau(NamedMethod::RknIIIA);
    auto cn_holds = [&](int kappa) {
        for (int i = 0; i < 3; ++i) {
            double lhs = 0.0;
            for (int j = 0; j < 3; ++j) {
                lhs += t.a_bar(i, j) * std::pow(t.c(j), kappa - 1);
            }
            if (std::abs(lhs - std::pow(t.c(i), kappa + 1) / (kappa * (kappa + 1.0))) > 1e-10) {
                return false;
            }
        }
        return true;
    };
    int eta = 1;
    while (eta < 13 && cn_holds(eta)) {
        ++eta;
    }
    CHECK(csrkn::check_simplifying_discrete(t).eta == eta);
}

TEST_CASE("lower triangular detection")
{
    CHECK(csrkn::is_lower_triangular(csrkn::named_tableau(NamedMethod::Diagsymp)));
    CHECK_FALSE(csrkn::is_lower_triangular(csrkn::named_tableau(NamedMethod::RknIIIB)));
}

TEST_CASE("validation")
{
    auto t = csrkn::named_tableau(NamedMethod::Diagsymp);
    t.validate();
    t.a_bar(0, 0) = std::nan("");
    CHECK_THROWS_AS(t.validate(), csrkn::Error);
    auto u = csrkn::named_tableau(NamedMethod::Diagsymp);
    u.b.resize(2);
    CHECK_THROWS_AS(u.validate(), csrkn::Error);
}

TEST_CASE("tableau text format round trip")
{
    std::mt19937 rng(31);
    for (int s = 1; s <= 4; ++s) {
        auto t = random_tableau(rng, s);
        t.label = "random \"quoted\" label";
        const auto back = csrkn::tableau_from_json(csrkn::tableau_to_json(t));
        CHECK(back.label == t.label);
        CHECK(back.c == t.c);
        CHECK(back.a_bar == t.a_bar);
        CHECK(back.b_bar == t.b_bar);
        CHECK(back.b == t.b);
    }
    const auto text = csrkn::tableau_to_json(csrkn::named_tableau(NamedMethod::Diagsymp));
    CHECK(text.find("\"format\": \"rkn-tableau/1\"") != std::string::npos);

    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "csrkn_test_tableau.json";
    csrkn::save_tableau(csrkn::named_tableau(NamedMethod::RknA), path);
    CHECK(max_diff(csrkn::load_tableau(path), csrkn::named_tableau(NamedMethod::RknA)) == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("tableau text format rejects bad input")
{
    auto code_of = [](const std::string& text) {
        try {
            (void)csrkn::tableau_from_json(text);
        } catch (const csrkn::Error& e) {
            return e.code();
        }
        return csrkn::ErrorCode::Io;
    };
    std::string good = csrkn::tableau_to_json(csrkn::named_tableau(NamedMethod::RknB));
    std::string v2 = good;
    v2.replace(v2.find("rkn-tableau/1"), 13, "rkn-tableau/2");
    CHECK(code_of(v2) == csrkn::ErrorCode::Parse);
    CHECK(code_of("{") == csrkn::ErrorCode::Parse);
    CHECK(code_of("[]") == csrkn::ErrorCode::Parse);
    CHECK(code_of(R"({"format":"rkn-tableau/1","label":"x","s":2,"c":[0],"a_bar":[[0]],)"
                  R"("b_bar":[0],"b":[1]})") == csrkn::ErrorCode::Parse);
    CHECK(code_of(R"({"format":"rkn-tableau/1","label":"x","s":1,"c":[0],"a_bar":[[0]],)"
                  R"("b_bar":["a"],"b":[1]})") == csrkn::ErrorCode::Parse);

    try {
        (void)csrkn::load_tableau("/nonexistent/dir/t.json");
        FAIL("expected an error");
    } catch (const csrkn::Error& e) {
        CHECK(e.code() == csrkn::ErrorCode::Io);
    }
}

TEST_CASE("number formatting round trips")
{
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int n = 0; n < 1000; ++n) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(csrkn::format_double(v)) == v);
    }
    CHECK(csrkn::format_double(0.5) == "0.5");
}
