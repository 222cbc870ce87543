#include "csrkn/csrkn.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>
#include <utility>

#include "csrkn/cscoeff.hpp"
#include "csrkn/error.hpp"
#include "csrkn/integrator.hpp"
#include "csrkn/problems.hpp"
#include "csrkn/quadrature.hpp"
#include "csrkn/tableau.hpp"
#include "csrkn/tableau_io.hpp"

struct csrkn_tableau {
    csrkn::RknTableau value;
};

struct csrkn_problem {
    csrkn::OdeProblem value;
};

struct csrkn_trajectory {
    csrkn::Trajectory value;
};

namespace {

thread_local std::string last_error;

csrkn_status to_status(csrkn::ErrorCode code)
{
    using csrkn::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidArgument: return CSRKN_E_INVALID_ARGUMENT;
    case ErrorCode::DegreeOverflow: return CSRKN_E_DEGREE_OVERFLOW;
    case ErrorCode::UnsupportedStageCount: return CSRKN_E_UNSUPPORTED_STAGES;
    case ErrorCode::SymmetryViolation: return CSRKN_E_SYMMETRY_VIOLATION;
    case ErrorCode::ExpansionConstraint: return CSRKN_E_EXPANSION_CONSTRAINT;
    case ErrorCode::StageDivergence: return CSRKN_E_STAGE_DIVERGENCE;
    case ErrorCode::InvalidGrid: return CSRKN_E_INVALID_GRID;
    case ErrorCode::DegenerateFit: return CSRKN_E_DEGENERATE_FIT;
    case ErrorCode::Parse: return CSRKN_E_PARSE;
    case ErrorCode::Io: return CSRKN_E_IO;
    }
    return CSRKN_E_INTERNAL;
}

csrkn_status fail(csrkn_status status, std::string message)
{
    last_error = std::move(message);
    return status;
}

// Runs body, translating exceptions into status codes.
template <class Body>
csrkn_status guarded(Body&& body) noexcept
{
    try {
        return body();
    } catch (const csrkn::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(CSRKN_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CSRKN_E_INTERNAL, e.what());
    } catch (...) {
        return fail(CSRKN_E_INTERNAL, "unknown exception");
    }
}

#define CSRKN_REQUIRE(cond, what)                                                                  \
    do {                                                                                           \
        if (!(cond)) {                                                                             \
            return fail(CSRKN_E_INVALID_ARGUMENT, what);                                           \
        }                                                                                          \
    } while (0)

csrkn::StepConfig to_config(const csrkn_step_config& in)
{
    csrkn::StepConfig cfg;
    cfg.h = in.h;
    cfg.stage_tol = in.stage_tol;
    cfg.max_iters = in.max_iters;
    switch (in.structure) {
    case CSRKN_STAGES_AUTO: cfg.structure = csrkn::StageStructure::Auto; break;
    case CSRKN_STAGES_FULL_IMPLICIT: cfg.structure = csrkn::StageStructure::FullImplicit; break;
    case CSRKN_STAGES_SEQUENTIAL:
        cfg.structure = csrkn::StageStructure::SequentialLowerTriangular;
        break;
    default: throw csrkn::Error(csrkn::ErrorCode::InvalidArgument, "unknown stage structure");
    }
    return cfg;
}

csrkn_status emit(csrkn::RknTableau t, csrkn_tableau** out)
{
    *out = new csrkn_tableau{std::move(t)};
    return CSRKN_OK;
}

} // namespace

extern "C" {

const char* csrkn_version(void)
{
    return "1.0.0";
}

const char* csrkn_status_string(csrkn_status status)
{
    switch (status) {
    case CSRKN_OK: return "ok";
    case CSRKN_E_INVALID_ARGUMENT: return "invalid argument";
    case CSRKN_E_DEGREE_OVERFLOW: return "degree overflow";
    case CSRKN_E_UNSUPPORTED_STAGES: return "unsupported stage count";
    case CSRKN_E_SYMMETRY_VIOLATION: return "symmetry violation";
    case CSRKN_E_EXPANSION_CONSTRAINT: return "expansion constraint";
    case CSRKN_E_STAGE_DIVERGENCE: return "stage divergence";
    case CSRKN_E_INVALID_GRID: return "invalid grid";
    case CSRKN_E_DEGENERATE_FIT: return "degenerate fit";
    case CSRKN_E_PARSE: return "parse error";
    case CSRKN_E_IO: return "i/o error";
    case CSRKN_E_BUFFER_TOO_SMALL: return "buffer too small";
    case CSRKN_E_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* csrkn_last_error(void)
{
    return last_error.c_str();
}

void csrkn_step_config_default(csrkn_step_config* cfg)
{
    if (cfg == nullptr) {
        return;
    }
    const csrkn::StepConfig d;
    cfg->h = d.h;
    cfg->stage_tol = d.stage_tol;
    cfg->max_iters = d.max_iters;
    cfg->structure = CSRKN_STAGES_AUTO;
}

csrkn_status csrkn_tableau_named(const char* name, csrkn_tableau** out)
{
    CSRKN_REQUIRE(name != nullptr && out != nullptr, "null argument");
    return guarded([&] { return emit(csrkn::named_tableau(csrkn::parse_method_name(name)), out); });
}

csrkn_status csrkn_tableau_from_family(const csrkn_family_params* params,
                                       csrkn_quadrature quadrature, int stages,
                                       csrkn_tableau** out)
{
    CSRKN_REQUIRE(params != nullptr && out != nullptr, "null argument");
    return guarded([&] {
        csrkn::QuadratureKind kind;
        switch (quadrature) {
        case CSRKN_QUADRATURE_GAUSS: kind = csrkn::QuadratureKind::Gauss; break;
        case CSRKN_QUADRATURE_LOBATTO: kind = csrkn::QuadratureKind::Lobatto; break;
        default: return fail(CSRKN_E_INVALID_ARGUMENT, "unknown quadrature");
        }
        const auto rule = csrkn::make_rule(kind, stages);
        switch (params->family) {
        case CSRKN_FAMILY_ORDER2:
            return emit(csrkn::discretize(csrkn::build_order2(params->alpha), rule), out);
        case CSRKN_FAMILY_ORDER4:
            return emit(csrkn::discretize(
                            csrkn::build_order4(params->alpha, params->beta, params->gamma),
                            rule),
                        out);
        case CSRKN_FAMILY_ORDER6:
            return emit(csrkn::discretize(csrkn::build_order6(params->alpha), rule), out);
        case CSRKN_FAMILY_EXPANSION:
            return emit(csrkn::discretize(csrkn::build_expansion(params->eta, params->zeta, {}),
                                          rule),
                        out);
        }
        return fail(CSRKN_E_INVALID_ARGUMENT, "unknown coefficient family");
    });
}

csrkn_status csrkn_tableau_from_arrays(int s, const double* c, const double* a_bar,
                                       const double* b_bar, const double* b, const char* label,
                                       csrkn_tableau** out)
{
    CSRKN_REQUIRE(out != nullptr && c != nullptr && a_bar != nullptr && b_bar != nullptr &&
                      b != nullptr,
                  "null argument");
    CSRKN_REQUIRE(s >= 1, "stage count must be positive");
    return guarded([&] {
        csrkn::RknTableau t;
        t.c = Eigen::Map<const Eigen::VectorXd>(c, s);
        t.a_bar = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                 Eigen::RowMajor>>(a_bar, s, s);
        t.b_bar = Eigen::Map<const Eigen::VectorXd>(b_bar, s);
        t.b = Eigen::Map<const Eigen::VectorXd>(b, s);
        t.label = label != nullptr ? label : "";
        t.validate();
        return emit(std::move(t), out);
    });
}

csrkn_status csrkn_tableau_load(const char* path, csrkn_tableau** out)
{
    CSRKN_REQUIRE(path != nullptr && out != nullptr, "null argument");
    return guarded([&] { return emit(csrkn::load_tableau(path), out); });
}

csrkn_status csrkn_tableau_parse(const char* text, csrkn_tableau** out)
{
    CSRKN_REQUIRE(text != nullptr && out != nullptr, "null argument");
    return guarded([&] { return emit(csrkn::tableau_from_json(text), out); });
}

csrkn_status csrkn_tableau_save(const csrkn_tableau* t, const char* path)
{
    CSRKN_REQUIRE(t != nullptr && path != nullptr, "null argument");
    return guarded([&] {
        csrkn::save_tableau(t->value, path);
        return CSRKN_OK;
    });
}

csrkn_status csrkn_tableau_to_json(const csrkn_tableau* t, char* buf, size_t cap, size_t* needed)
{
    CSRKN_REQUIRE(t != nullptr, "null tableau");
    return guarded([&] {
        const std::string text = csrkn::tableau_to_json(t->value);
        const size_t want = text.size() + 1;
        if (needed != nullptr) {
            *needed = want;
        }
        if (buf == nullptr) {
            return CSRKN_OK;
        }
        if (cap < want) {
            return fail(CSRKN_E_BUFFER_TOO_SMALL,
                        "need " + std::to_string(want) + " bytes for tableau text");
        }
        std::memcpy(buf, text.c_str(), want);
        return CSRKN_OK;
    });
}

csrkn_status csrkn_tableau_adjoint(const csrkn_tableau* t, csrkn_tableau** out)
{
    CSRKN_REQUIRE(t != nullptr && out != nullptr, "null argument");
    return guarded([&] { return emit(csrkn::adjoint(t->value), out); });
}

void csrkn_tableau_free(csrkn_tableau* t)
{
    delete t;
}

int csrkn_tableau_stages(const csrkn_tableau* t)
{
    return t != nullptr ? t->value.stages() : 0;
}

const char* csrkn_tableau_label(const csrkn_tableau* t)
{
    return t != nullptr ? t->value.label.c_str() : "";
}

csrkn_status csrkn_tableau_coefficients(const csrkn_tableau* t, double* c, double* a_bar,
                                        double* b_bar, double* b)
{
    CSRKN_REQUIRE(t != nullptr, "null tableau");
    const auto& v = t->value;
    const int s = v.stages();
    for (int i = 0; i < s; ++i) {
        if (c != nullptr) {
            c[i] = v.c(i);
        }
        if (b_bar != nullptr) {
            b_bar[i] = v.b_bar(i);
        }
        if (b != nullptr) {
            b[i] = v.b(i);
        }
        if (a_bar != nullptr) {
            for (int j = 0; j < s; ++j) {
                a_bar[i * s + j] = v.a_bar(i, j);
            }
        }
    }
    return CSRKN_OK;
}

csrkn_status csrkn_tableau_analyze(const csrkn_tableau* t, csrkn_report* out)
{
    CSRKN_REQUIRE(t != nullptr && out != nullptr, "null argument");
    return guarded([&] {
        const auto sym = csrkn::is_symmetric(t->value);
        const auto spl = csrkn::is_symplectic(t->value);
        const auto orders = csrkn::check_simplifying_discrete(t->value);
        const auto bound = csrkn::classical_order_bound(t->value);
        out->stages = t->value.stages();
        out->symmetric = sym.holds ? 1 : 0;
        out->symmetry_deviation = sym.deviation;
        out->symplectic = spl.holds ? 1 : 0;
        out->symplecticity_residual = spl.deviation;
        out->xi = orders.xi;
        out->eta = orders.eta;
        out->zeta = orders.zeta;
        out->order_bound = bound.bound;
        out->bbar_consistent = bound.bbar_consistent ? 1 : 0;
        return CSRKN_OK;
    });
}

csrkn_status csrkn_problem_create(const char* name, csrkn_problem** out)
{
    CSRKN_REQUIRE(name != nullptr && out != nullptr, "null argument");
    return guarded([&] {
        *out = new csrkn_problem{csrkn::problem_by_name(name)};
        return CSRKN_OK;
    });
}

void csrkn_problem_free(csrkn_problem* p)
{
    delete p;
}

int csrkn_problem_dim(const csrkn_problem* p)
{
    return p != nullptr ? p->value.dim : 0;
}

int csrkn_problem_has_energy(const csrkn_problem* p)
{
    return p != nullptr && p->value.has_energy() ? 1 : 0;
}

csrkn_status csrkn_integrate(const csrkn_tableau* t, const csrkn_problem* p, double t_end,
                             const csrkn_step_config* cfg, int sample_every,
                             csrkn_trajectory** out)
{
    CSRKN_REQUIRE(t != nullptr && p != nullptr && cfg != nullptr && out != nullptr,
                  "null argument");
    return guarded([&] {
        auto traj = csrkn::integrate(t->value, p->value, t_end, to_config(*cfg), sample_every);
        const bool failed = traj.failed;
        std::string message = traj.failure_message;
        *out = new csrkn_trajectory{std::move(traj)};
        if (failed) {
            return fail(CSRKN_E_STAGE_DIVERGENCE, std::move(message));
        }
        return CSRKN_OK;
    });
}

void csrkn_trajectory_free(csrkn_trajectory* tr)
{
    delete tr;
}

size_t csrkn_trajectory_size(const csrkn_trajectory* tr)
{
    return tr != nullptr ? tr->value.size() : 0;
}

int csrkn_trajectory_dim(const csrkn_trajectory* tr)
{
    return tr != nullptr ? tr->value.dim : 0;
}

const double* csrkn_trajectory_times(const csrkn_trajectory* tr)
{
    return tr != nullptr ? tr->value.times.data() : nullptr;
}

const double* csrkn_trajectory_q(const csrkn_trajectory* tr)
{
    return tr != nullptr ? tr->value.q.data() : nullptr;
}

const double* csrkn_trajectory_p(const csrkn_trajectory* tr)
{
    return tr != nullptr ? tr->value.p.data() : nullptr;
}

const double* csrkn_trajectory_energy_error(const csrkn_trajectory* tr)
{
    if (tr == nullptr || tr->value.energy_error.empty()) {
        return nullptr;
    }
    return tr->value.energy_error.data();
}

int csrkn_trajectory_failed(const csrkn_trajectory* tr)
{
    return tr != nullptr && tr->value.failed ? 1 : 0;
}

csrkn_status csrkn_trajectory_drift(const csrkn_trajectory* tr, double* slope, double* max_abs)
{
    CSRKN_REQUIRE(tr != nullptr, "null trajectory");
    if (!tr->value.energy_fit) {
        return fail(CSRKN_E_INVALID_ARGUMENT, "trajectory has no energy series");
    }
    if (slope != nullptr) {
        *slope = tr->value.energy_fit->slope;
    }
    if (max_abs != nullptr) {
        *max_abs = tr->value.energy_fit->max_abs;
    }
    return CSRKN_OK;
}

csrkn_status csrkn_global_error_study(const csrkn_tableau* t, const csrkn_problem* p,
                                      double t_end, const double* h, size_t n,
                                      const csrkn_step_config* cfg, double* errors, double* slope,
                                      char* reference, size_t reference_cap)
{
    CSRKN_REQUIRE(t != nullptr && p != nullptr && cfg != nullptr && errors != nullptr,
                  "null argument");
    CSRKN_REQUIRE(h != nullptr || n == 0, "null step-size list");
    return guarded([&] {
        const auto study = csrkn::global_error_study(t->value, p->value, t_end,
                                                     std::span<const double>(h, n),
                                                     to_config(*cfg));
        std::copy(study.error.begin(), study.error.end(), errors);
        if (slope != nullptr) {
            *slope = study.slope;
        }
        if (reference != nullptr && reference_cap > 0) {
            const size_t len = std::min(reference_cap - 1, study.reference.size());
            std::memcpy(reference, study.reference.data(), len);
            reference[len] = '\0';
        }
        if (study.any_failed) {
            return fail(CSRKN_E_STAGE_DIVERGENCE, "stage solver failed for some step sizes");
        }
        return CSRKN_OK;
    });
}

csrkn_status csrkn_reversibility_test(const csrkn_tableau* t, const csrkn_problem* p,
                                      const csrkn_step_config* cfg, double* deviation)
{
    CSRKN_REQUIRE(t != nullptr && p != nullptr && cfg != nullptr && deviation != nullptr,
                  "null argument");
    return guarded([&] {
        *deviation = csrkn::reversibility_test(t->value, p->value, to_config(*cfg));
        return CSRKN_OK;
    });
}

} // extern "C"
