// csrkn: derive, check and exercise symmetric RKN tableaus from the shell.
//
// Exit codes: 0 success, 1 usage or parse error, 2 property check failed,
// 3 solver failure.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csrkn/csrkn.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kProperty = 2, kSolver = 3 };

struct TableauDeleter {
    void operator()(csrkn_tableau* t) const { csrkn_tableau_free(t); }
};
struct ProblemDeleter {
    void operator()(csrkn_problem* p) const { csrkn_problem_free(p); }
};
struct TrajectoryDeleter {
    void operator()(csrkn_trajectory* t) const { csrkn_trajectory_free(t); }
};
using TableauPtr = std::unique_ptr<csrkn_tableau, TableauDeleter>;
using ProblemPtr = std::unique_ptr<csrkn_problem, ProblemDeleter>;
using TrajectoryPtr = std::unique_ptr<csrkn_trajectory, TrajectoryDeleter>;

// Failure carrying the exit code the process should end with.
struct CliFailure {
    int code;
    std::string message;
};

[[noreturn]] void raise(int code, const std::string& what)
{
    throw CliFailure{code, what};
}

int exit_for(csrkn_status s)
{
    return s == CSRKN_E_STAGE_DIVERGENCE ? kSolver : kUsage;
}

void check(csrkn_status s, const std::string& context)
{
    if (s != CSRKN_OK) {
        raise(exit_for(s), context + ": " + csrkn_last_error());
    }
}

std::string num(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

TableauPtr named(const std::string& name)
{
    csrkn_tableau* t = nullptr;
    check(csrkn_tableau_named(name.c_str(), &t), "method '" + name + "'");
    return TableauPtr(t);
}

TableauPtr loaded(const std::string& path)
{
    csrkn_tableau* t = nullptr;
    check(csrkn_tableau_load(path.c_str(), &t), path);
    return TableauPtr(t);
}

ProblemPtr problem(const std::string& name)
{
    csrkn_problem* p = nullptr;
    check(csrkn_problem_create(name.c_str(), &p), "problem '" + name + "'");
    return ProblemPtr(p);
}

// A method selected by name or by tableau file, with the label used in CSV.
struct Selected {
    std::string label;
    TableauPtr tableau;
};

std::vector<Selected> select(const std::vector<std::string>& methods,
                             const std::vector<std::string>& files)
{
    if (methods.empty() && files.empty()) {
        raise(kUsage, "give at least one --method or --tableau");
    }
    std::vector<Selected> out;
    for (const auto& m : methods) {
        out.push_back({m, named(m)});
    }
    for (const auto& f : files) {
        auto t = loaded(f);
        std::string label = csrkn_tableau_label(t.get());
        out.push_back({label.empty() ? f : label, std::move(t)});
    }
    return out;
}

std::vector<double> parse_h_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) {
            raise(kUsage, "empty entry in --h-list");
        }
        item = item.substr(first, last - first + 1);
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc() || res.ptr != item.data() + item.size() || !(v > 0.0)) {
            raise(kUsage, "bad step size '" + item + "' in --h-list");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        raise(kUsage, "--h-list must not be empty");
    }
    return out;
}

// Writes to --out when given, standard output otherwise.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                raise(kUsage, "cannot write '" + path + "'");
            }
        }
    }
    std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void print_summary(const csrkn_tableau* t)
{
    csrkn_report r{};
    check(csrkn_tableau_analyze(t, &r), "analysis");
    std::cout << "label=" << csrkn_tableau_label(t) << '\n'
              << "s=" << r.stages << '\n'
              << "symmetric=" << (r.symmetric ? "yes" : "no")
              << " deviation=" << num(r.symmetry_deviation) << '\n'
              << "symplectic=" << (r.symplectic ? "yes" : "no")
              << " residual=" << num(r.symplecticity_residual) << '\n'
              << "simplifying=(" << r.xi << ',' << r.eta << ',' << r.zeta << ")\n"
              << "order_bound=" << r.order_bound << '\n';
}

// ---- derive -----------------------------------------------------------------

struct DeriveArgs {
    std::string family;
    std::string method;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    int eta = 1;
    int zeta = 1;
    std::string quadrature;
    int stages = 0;
    std::string out;
};

int run_derive(const DeriveArgs& a)
{
    TableauPtr t;
    if (!a.method.empty()) {
        if (!a.quadrature.empty() || a.stages != 0) {
            raise(kUsage, "--quadrature/--stages do not apply to --method");
        }
        t = named(a.method);
    } else {
        if (a.family.empty()) {
            raise(kUsage, "give --family or --method");
        }
        if (a.quadrature.empty() || a.stages == 0) {
            raise(kUsage, "--family needs --quadrature and --stages");
        }
        csrkn_family_params p{};
        if (a.family == "order2") {
            p.family = CSRKN_FAMILY_ORDER2;
        } else if (a.family == "order4") {
            p.family = CSRKN_FAMILY_ORDER4;
        } else if (a.family == "order6") {
            p.family = CSRKN_FAMILY_ORDER6;
        } else {
            p.family = CSRKN_FAMILY_EXPANSION;
        }
        p.alpha = a.alpha;
        p.beta = a.beta;
        p.gamma = a.gamma;
        p.eta = a.eta;
        p.zeta = a.zeta;
        const auto q = a.quadrature == "gauss" ? CSRKN_QUADRATURE_GAUSS : CSRKN_QUADRATURE_LOBATTO;
        csrkn_tableau* raw = nullptr;
        check(csrkn_tableau_from_family(&p, q, a.stages, &raw), "derive");
        t.reset(raw);
    }
    if (!a.out.empty()) {
        check(csrkn_tableau_save(t.get(), a.out.c_str()), "write");
    }
    print_summary(t.get());
    return kOk;
}

// ---- check ------------------------------------------------------------------

int run_check(const std::string& path)
{
    auto t = loaded(path);
    print_summary(t.get());
    csrkn_report r{};
    check(csrkn_tableau_analyze(t.get(), &r), "analysis");
    return r.symmetric ? kOk : kProperty;
}

// ---- converge ---------------------------------------------------------------

struct StudyArgs {
    std::vector<std::string> methods;
    std::vector<std::string> tableaus;
    std::string problem = "pendulum";
    double t_end = 10.0;
    std::string h_list = "0.2,0.1,0.05,0.025,0.0125,0.00625";
    double h = 0.16;
    int sample_every = 10;
    std::string out;
};

int run_converge(const StudyArgs& a)
{
    const auto hs = parse_h_list(a.h_list);
    auto selected = select(a.methods, a.tableaus);
    auto prob = problem(a.problem);
    csrkn_step_config cfg;
    csrkn_step_config_default(&cfg);

    struct Row {
        std::vector<double> errors;
        double slope = NAN;
        std::string reference;
    };
    std::vector<Row> rows(selected.size());
    bool solver_failed = false;
    for (std::size_t m = 0; m < selected.size(); ++m) {
        rows[m].errors.assign(hs.size(), NAN);
        char ref[128] = {};
        const auto s = csrkn_global_error_study(selected[m].tableau.get(), prob.get(), a.t_end,
                                                hs.data(), hs.size(), &cfg, rows[m].errors.data(),
                                                &rows[m].slope, ref, sizeof ref);
        if (s == CSRKN_E_STAGE_DIVERGENCE) {
            solver_failed = true;
            std::cerr << "csrkn: " << selected[m].label << ": " << csrkn_last_error() << '\n';
        } else {
            check(s, selected[m].label);
        }
        rows[m].reference = ref;
    }

    Sink sink(a.out);
    auto& os = sink.os();
    os << "method,h,error\n";
    for (std::size_t m = 0; m < selected.size(); ++m) {
        for (std::size_t k = 0; k < hs.size(); ++k) {
            os << selected[m].label << ',' << num(hs[k]) << ',' << num(rows[m].errors[k]) << '\n';
        }
    }
    for (std::size_t m = 0; m < selected.size(); ++m) {
        os << "# slope," << selected[m].label << ',' << num(rows[m].slope) << '\n';
    }
    if (!rows.empty() && !rows.front().reference.empty()) {
        os << "# reference," << rows.front().reference << '\n';
    }
    return solver_failed ? kSolver : kOk;
}

// ---- drift ------------------------------------------------------------------

int run_drift(const StudyArgs& a)
{
    if (a.sample_every < 1) {
        raise(kUsage, "--sample-every must be at least 1");
    }
    auto selected = select(a.methods, a.tableaus);
    auto prob = problem(a.problem);
    if (!csrkn_problem_has_energy(prob.get())) {
        raise(kUsage, "problem '" + a.problem + "' has no energy");
    }
    csrkn_step_config cfg;
    csrkn_step_config_default(&cfg);
    cfg.h = a.h;

    struct Run {
        TrajectoryPtr traj;
        csrkn_status status = CSRKN_OK;
        std::string message;
    };
    // Methods are independent; run them side by side and print in order.
    std::vector<std::future<Run>> jobs;
    for (const auto& sel : selected) {
        jobs.push_back(std::async(std::launch::async, [&, t = sel.tableau.get()] {
            Run r;
            csrkn_trajectory* raw = nullptr;
            r.status = csrkn_integrate(t, prob.get(), a.t_end, &cfg, a.sample_every, &raw);
            r.traj.reset(raw);
            if (r.status != CSRKN_OK) {
                r.message = csrkn_last_error();
            }
            return r;
        }));
    }
    std::vector<Run> runs;
    for (auto& j : jobs) {
        runs.push_back(j.get());
    }

    bool solver_failed = false;
    for (std::size_t m = 0; m < runs.size(); ++m) {
        if (runs[m].status == CSRKN_E_STAGE_DIVERGENCE) {
            solver_failed = true;
            std::cerr << "csrkn: " << selected[m].label << ": " << runs[m].message << '\n';
        } else if (runs[m].status != CSRKN_OK) {
            raise(kUsage, selected[m].label + ": " + runs[m].message);
        }
    }

    Sink sink(a.out);
    auto& os = sink.os();
    os << "method,t,energy_error\n";
    std::vector<std::pair<double, double>> fits;
    for (std::size_t m = 0; m < runs.size(); ++m) {
        const auto* tr = runs[m].traj.get();
        const std::size_t n = csrkn_trajectory_size(tr);
        const double* t = csrkn_trajectory_times(tr);
        const double* e = csrkn_trajectory_energy_error(tr);
        for (std::size_t k = 0; k < n; ++k) {
            os << selected[m].label << ',' << num(t[k]) << ',' << num(e[k]) << '\n';
        }
        double slope = NAN;
        double max_abs = NAN;
        (void)csrkn_trajectory_drift(tr, &slope, &max_abs);
        fits.emplace_back(slope, max_abs);
    }
    for (std::size_t m = 0; m < runs.size(); ++m) {
        os << "# drift_slope," << selected[m].label << ',' << num(fits[m].first) << '\n';
        os << "# max_abs," << selected[m].label << ',' << num(fits[m].second) << '\n';
    }
    return solver_failed ? kSolver : kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Symmetric continuous-stage RKN methods"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(csrkn_version()));

    const std::vector<std::string> method_names{"rkn-iiia", "rkn-iiib", "diagsymp", "rkn-a",
                                                "rkn-b"};
    const std::vector<std::string> problem_names{"pendulum", "harmonic", "kepler"};

    DeriveArgs d;
    auto* derive = app.add_subcommand("derive", "build a tableau and report its properties");
    auto* fam = derive->add_option("--family", d.family, "coefficient family")
                    ->check(CLI::IsMember({"order2", "order4", "order6", "expansion"}));
    auto* meth = derive->add_option("--method", d.method, "named method")
                     ->check(CLI::IsMember(method_names));
    fam->excludes(meth);
    derive->add_option("--alpha", d.alpha, "free parameter alpha");
    derive->add_option("--beta", d.beta, "free parameter beta (order4)");
    derive->add_option("--gamma", d.gamma, "free parameter gamma (order4)");
    derive->add_option("--eta", d.eta, "CN order (expansion)");
    derive->add_option("--zeta", d.zeta, "DN order (expansion)");
    derive->add_option("--quadrature", d.quadrature, "quadrature rule")
        ->check(CLI::IsMember({"gauss", "lobatto"}));
    derive->add_option("--stages", d.stages, "number of stages")->check(CLI::PositiveNumber);
    derive->add_option("--out", d.out, "tableau file to write");

    std::string check_path;
    auto* chk = app.add_subcommand("check", "report properties of a tableau file");
    chk->add_option("file", check_path, "rkn-tableau/1 file")->required();

    StudyArgs c;
    auto* conv = app.add_subcommand("converge", "global error against step size (CSV)");
    conv->add_option("--method", c.methods, "named method (repeatable)")
        ->check(CLI::IsMember(method_names));
    conv->add_option("--tableau", c.tableaus, "tableau file (repeatable)");
    conv->add_option("--problem", c.problem, "test problem")->check(CLI::IsMember(problem_names));
    conv->add_option("--t-end", c.t_end, "final time");
    conv->add_option("--h-list", c.h_list, "comma separated step sizes");
    conv->add_option("--out", c.out, "CSV file (default: standard output)");

    StudyArgs r;
    r.t_end = 1600.0;
    auto* drift = app.add_subcommand("drift", "energy error along a long run (CSV)");
    drift->set_help_flag("--help", "Print this help message and exit");
    drift->add_option("--method", r.methods, "named method (repeatable)")
        ->check(CLI::IsMember(method_names));
    drift->add_option("--tableau", r.tableaus, "tableau file (repeatable)");
    drift->add_option("--problem", r.problem, "test problem")->check(CLI::IsMember(problem_names));
    drift->add_option("--h", r.h, "step size")->check(CLI::PositiveNumber);
    drift->add_option("--t-end", r.t_end, "final time");
    drift->add_option("--sample-every", r.sample_every, "keep every n-th step");
    drift->add_option("--out", r.out, "CSV file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*derive) {
            return run_derive(d);
        }
        if (*chk) {
            return run_check(check_path);
        }
        if (*conv) {
            return run_converge(c);
        }
        return run_drift(r);
    } catch (const CliFailure& f) {
        std::cerr << "csrkn: " << f.message << '\n';
        return f.code;
    }
}
