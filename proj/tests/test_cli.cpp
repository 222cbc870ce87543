#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <doctest.h>

#include "csrkn/csrkn.h"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args)
{
    const std::string cmd = std::string(CSRKN_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
        r.out.append(buf, n);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// Value of "key=value" in a summary.
std::string field(const std::string& out, const std::string& key)
{
    const auto pos = out.find(key + "=");
    REQUIRE(pos != std::string::npos);
    const auto start = pos + key.size() + 1;
    return out.substr(start, out.find_first_of(" \n", start) - start);
}

// "# name,method,value" comment lines.
std::map<std::string, double> comments(const std::string& out, const std::string& name)
{
    std::map<std::string, double> m;
    std::istringstream in(out);
    std::string line;
    const std::string prefix = "# " + name + ",";
    while (std::getline(in, line)) {
        if (line.rfind(prefix, 0) == 0) {
            const auto rest = line.substr(prefix.size());
            const auto comma = rest.find(',');
            m[rest.substr(0, comma)] = std::stod(rest.substr(comma + 1));
        }
    }
    return m;
}

std::string temp_file(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("derive reports properties")
{
    auto r = cli("derive --family order4 --alpha -0.0833333333333333 --beta 0 --gamma "
                 "0.0372677996249965 --quadrature lobatto --stages 3");
    CHECK(r.code == 0);
    CHECK(field(r.out, "symmetric") == "yes");
    CHECK(field(r.out, "symplectic") == "no");
    CHECK(field(r.out, "s") == "3");

    r = cli("derive --method diagsymp");
    CHECK(r.code == 0);
    CHECK(field(r.out, "symmetric") == "yes");
    CHECK(field(r.out, "symplectic") == "yes");

    r = cli("derive --family order6 --alpha 0 --quadrature gauss --stages 3");
    CHECK(r.code == 0);
    CHECK(std::stoi(field(r.out, "order_bound")) >= 6);
}

TEST_CASE("derive usage errors")
{
    CHECK(cli("derive --family order4 --method diagsymp").code == 1);
    CHECK(cli("derive --family order4 --quadrature lobatto --stages 1").code == 1);
    CHECK(cli("derive --family order4 --quadrature gauss --stages 11").code == 1);
    CHECK(cli("derive --family order9 --quadrature gauss --stages 2").code == 1);
    CHECK(cli("derive --family order4").code == 1);
    CHECK(cli("derive --method diagsymp --out /nonexistent/dir/t.json").code == 1);
    CHECK(cli("").code == 1);
    CHECK(cli("frobnicate").code == 1);
}

TEST_CASE("derive and check round trip")
{
    const auto path = temp_file("csrkn_cli_iiib.json");
    REQUIRE(cli("derive --method rkn-iiib --out " + path).code == 0);
    auto r = cli("check " + path);
    CHECK(r.code == 0);
    CHECK(field(r.out, "symmetric") == "yes");
    // As a single RKN method Lobatto IIIB fails condition (ii).
    CHECK(field(r.out, "symplectic") == "no");

    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    in.close();

    // Corrupt a_bar(1,2): the first row is [0, -1/12, 0].
    std::string corrupt = text;
    const auto row = corrupt.find("[0.0000000000000000e+00, -8.3333333333333329e-02");
    REQUIRE(row != std::string::npos);
    corrupt.replace(row + 25, 23, "-9.0000000000000000e-02");
    const auto bad = temp_file("csrkn_cli_bad.json");
    std::ofstream(bad) << corrupt;
    r = cli("check " + bad);
    CHECK(r.code == 2);
    CHECK(field(r.out, "symmetric") == "no");

    std::string v2 = text;
    v2.replace(v2.find("rkn-tableau/1"), 13, "rkn-tableau/2");
    std::ofstream(bad) << v2;
    CHECK(cli("check " + bad).code == 1);
    CHECK(cli("check /nonexistent/file.json").code == 1);

    std::filesystem::remove(path);
    std::filesystem::remove(bad);
}

TEST_CASE("converge writes CSV with slopes")
{
    auto r = cli("converge --method rkn-iiib --method diagsymp --method rkn-a --method rkn-b "
                 "--problem pendulum --t-end 10");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("method,h,error\n", 0) == 0);
    const auto slopes = comments(r.out, "slope");
    REQUIRE(slopes.size() == 4);
    for (const auto& [m, s] : slopes) {
        CAPTURE(m);
        CHECK(s >= 3.85);
        CHECK(s <= 4.15);
    }
    // Rows come out in (method, h) order: the first data row is the largest h.
    CHECK(r.out.find("rkn-iiib,0.20000000000000001,") != std::string::npos);
    const auto first = r.out.find("rkn-iiib,");
    const auto second = r.out.find("diagsymp,");
    CHECK(first < second);

    r = cli("converge --method diagsymp --problem harmonic --h-list 0.2,0.1,0.05");
    CHECK(r.code == 0);
    CHECK(r.out.find("# reference,exact") != std::string::npos);
}

TEST_CASE("converge usage and solver errors")
{
    CHECK(cli("converge --method diagsymp --h-list ''").code == 1);
    CHECK(cli("converge --method diagsymp --h-list 0.1,,0.05").code == 1);
    CHECK(cli("converge --method diagsymp --h-list 0.1,abc").code == 1);
    CHECK(cli("converge --method diagsymp --h-list 0.1,0.1").code == 1);
    CHECK(cli("converge --method diagsymp --h-list 0.3,0.1").code == 1);
    CHECK(cli("converge --problem pendulum").code == 1);
    CHECK(cli("converge --method rkn-z").code == 1);

    // Step sizes far beyond the fixed-point contraction give nan rows.
    const auto r = cli("converge --method rkn-iiib --problem pendulum --t-end 20 --h-list 5,4");
    CHECK(r.code == 3);
    CHECK(r.out.find(",nan\n") != std::string::npos);
}

TEST_CASE("drift writes CSV with fits")
{
    const auto out = temp_file("csrkn_cli_drift.csv");
    auto r = cli("drift --method rkn-iiib --method rkn-b --method diagsymp --problem pendulum "
                 "--h 0.16 --t-end 1600 --out " + out);
    REQUIRE(r.code == 0);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string csv = ss.str();
    CHECK(csv.rfind("method,t,energy_error\n", 0) == 0);
    const auto slopes = comments(csv, "drift_slope");
    const auto maxes = comments(csv, "max_abs");
    REQUIRE(slopes.size() == 3);
    CHECK(std::abs(slopes.at("diagsymp")) < 1e-9);
    CHECK(maxes.at("diagsymp") < 5e-4);
    CHECK(std::abs(slopes.at("rkn-iiib")) >= 100 * std::abs(slopes.at("diagsymp")));
    CHECK(std::abs(slopes.at("rkn-b")) >= 100 * std::abs(slopes.at("diagsymp")));

    // 1001 samples per method, methods in command-line order, times increasing.
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    double last_t = -1.0;
    std::string last_method;
    std::vector<std::string> order;
    while (std::getline(lines, line) && line[0] != '#') {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const std::string m = line.substr(0, c1);
        const double t = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        if (m != last_method) {
            order.push_back(m);
            last_t = -1.0;
        }
        CHECK(t > last_t);
        last_t = t;
        last_method = m;
        ++rows;
    }
    CHECK(rows == 3 * 1001);
    CHECK(order == std::vector<std::string>{"rkn-iiib", "rkn-b", "diagsymp"});
    std::filesystem::remove(out);
}

TEST_CASE("drift usage errors")
{
    CHECK(cli("drift --method diagsymp --sample-every 0").code == 1);
    CHECK(cli("drift --method diagsymp --h 0.3 --t-end 1").code == 1);
    CHECK(cli("drift --method diagsymp --h -1").code == 1);
}

TEST_CASE("CSV numbers round trip")
{
    // The CSV text re-parses to exactly the doubles the library computed.
    const auto r = cli("converge --method rkn-a --problem harmonic --h-list 0.2,0.1");
    REQUIRE(r.code == 0);
    csrkn_tableau* t = nullptr;
    csrkn_problem* p = nullptr;
    REQUIRE(csrkn_tableau_named("rkn-a", &t) == CSRKN_OK);
    REQUIRE(csrkn_problem_create("harmonic", &p) == CSRKN_OK);
    csrkn_step_config cfg;
    csrkn_step_config_default(&cfg);
    const double hs[2] = {0.2, 0.1};
    double errs[2];
    double slope = 0.0;
    REQUIRE(csrkn_global_error_study(t, p, 10.0, hs, 2, &cfg, errs, &slope, nullptr, 0) ==
            CSRKN_OK);
    csrkn_problem_free(p);
    csrkn_tableau_free(t);

    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    for (int k = 0; k < 2; ++k) {
        REQUIRE(std::getline(in, line));
        CHECK(std::stod(line.substr(line.rfind(',') + 1)) == errs[k]);
    }
    CHECK(comments(r.out, "slope").at("rkn-a") == slope);
}
