#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "holodisc/convergence.hpp"
#include "holodisc/io.hpp"
#include "holodisc/lift.hpp"
#include "holodisc/reflection.hpp"
#include "holodisc/rh_solver.hpp"
#include "holodisc/transforms.hpp"

namespace holodisc {

struct ExperimentResult {
    json report;
    std::string summary;
    std::string series_csv;                                    // empty when unused
    std::vector<std::pair<std::string, std::string>> dat_files;  // name -> content
    bool pass = false;
};

struct ExperimentConfig {
    std::string kind;
    int n_radial = 16;
    int n_angular = 64;
    double tol = 1e-9;
    std::uint64_t seed = 12345;
    int threads = 1;
    json raw;
};

namespace detail {

/// Deterministic uniform double in [lo, hi) with pinned bit mapping.
struct Rng {
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo = -1.0, double hi = 1.0) {
        return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    }
    Complex complex_unit() { return Complex(uniform(), uniform()); }
    std::mt19937_64 gen;
};

inline const json& require_field(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("missing config field: " + key);
    return j.at(key);
}

inline void summary_line(std::ostringstream& out, const std::string& name, double value, double tol,
                         bool pass) {
    out << (pass ? "PASS  " : "FAIL  ") << name << " = " << format_double(value)
        << "  (tol " << format_double(tol) << ")\n";
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j, const std::string& cli_kind = "") {
    ExperimentConfig c;
    c.raw = j;
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    const std::string schema = detail::require_field(j, "schema").get<std::string>();
    if (schema != "holodisc-config/1") throw ParseError("unknown schema: " + schema);
    c.kind = j.contains("kind") ? j.at("kind").get<std::string>() : cli_kind;
    if (c.kind.empty()) throw ParseError("missing config field: kind");
    if (!cli_kind.empty() && c.kind != cli_kind)
        throw ValidationError("config kind '" + c.kind + "' does not match requested '" + cli_kind + "'");
    static const char* kinds[] = {"transforms-check", "solve", "reflect",
                                  "analyticity",      "lift-check", "converge"};
    if (std::find_if(std::begin(kinds), std::end(kinds),
                     [&](const char* k) { return c.kind == k; }) == std::end(kinds))
        throw ParseError("unknown experiment kind: " + c.kind);
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (!g.is_array() || g.size() != 2) throw ParseError("grid must be [n_radial, n_angular]");
        c.n_radial = g[0].get<int>();
        c.n_angular = g[1].get<int>();
    }
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();

    // Semantic checks.
    if (c.tol <= 0.0) throw ValidationError("tolerance must be positive");
    if (c.threads < 1) throw ValidationError("threads must be >= 1");
    try {
        (void)make_disc_grid(c.n_radial, c.n_angular);
    } catch (const std::invalid_argument& ex) {
        throw ValidationError(std::string("grid: ") + ex.what());
    }
    return c;
}

// ---------------------------------------------------------------------------

namespace detail {

inline ExperimentResult run_transforms_check(const ExperimentConfig& cfg) {
    const int degree = cfg.raw.value("monomial_degree", 12);
    const int samples = cfg.raw.value("random_samples", 50);
    const int modes = cfg.raw.value("schwarz_modes", 32);
    const double identity_tol = cfg.raw.value("identity_tol", 1e-10);
    const double formula_tol = cfg.raw.value("formula_tol", 1e-9);
    if (degree < 1 || samples < 1 || modes < 1) throw ValidationError("transforms-check: sizes must be positive");

    struct Line {
        std::string name;
        double err;
        double tol;
        bool pass;
    };
    std::vector<Line> lines;

    {  // dbar o T_CG = id on monomials
        double worst = 0.0;
        for (int k = 0; k <= degree; ++k)
            for (int l = 0; k + l <= degree; ++l) {
                const Poly m = Poly::monomial(k, l, 1.0);
                worst = std::max(worst, (cauchy_green_poly(m).dbar() - m).max_abs_coeff());
            }
        lines.push_back({"dbar_cauchy_green_identity", worst, identity_tol, worst <= identity_tol});
    }
    {  // Schwarz: Re trace = psi and Im(0) = 0, exact in Fourier space
        double worst = 0.0;
        for (int m = 0; m <= modes; ++m)
            for (const Fourier& psi : {Fourier::cosine(m), Fourier::sine(m)}) {
                const PolyMap g = schwarz(psi);
                const Fourier diff = boundary_trace(g).real_part() - psi;
                worst = std::max(worst, diff.max_abs_coeff());
                worst = std::max(worst, std::abs(g[0].coeff(0, 0).imag()));
            }
        lines.push_back({"schwarz_identities", worst, identity_tol, worst <= identity_tol});
    }
    {  // Cauchy-Green formula on random spectral maps
        Rng rng(cfg.seed);
        double worst = 0.0;
        for (int s = 0; s < samples; ++s) {
            Poly u;
            for (int k = 0; k <= 8; ++k)
                for (int l = 0; k + l <= 8; ++l) u.set_coeff(k, l, rng.complex_unit());
            const Poly rebuilt = cauchy(boundary_trace(u))[0] + cauchy_green_poly(u.dbar());
            worst = std::max(worst, (rebuilt - u).max_abs_coeff());
        }
        lines.push_back({"cauchy_green_formula", worst, formula_tol, worst <= formula_tol});
    }
    {  // Cauchy transform sees only modes m >= 0
        Rng rng(cfg.seed + 1);
        double worst = 0.0;
        for (int s = 0; s < 8; ++s) {
            Fourier base(1, 6);
            for (int m = 0; m <= 6; ++m) base.set_coeff(m, 0, rng.complex_unit());
            Fourier noisy = base;
            for (int m = 1; m <= 6; ++m) noisy.set_coeff(-m, 0, rng.complex_unit());
            worst = std::max(worst, (cauchy(base)[0] - cauchy(noisy)[0]).max_abs_coeff());
        }
        lines.push_back({"cauchy_nonnegative_modes", worst, 0.0, worst == 0.0});
    }

    ExperimentResult res;
    res.pass = true;
    json criteria = json::array();
    std::ostringstream sum;
    sum << "transforms-check\n";
    for (const Line& l : lines) {
        res.pass = res.pass && l.pass;
        criteria.push_back({{"name", l.name}, {"max_error", l.err}, {"tol", l.tol}, {"pass", l.pass}});
        summary_line(sum, l.name, l.err, l.tol, l.pass);
    }
    res.report = {{"schema", "holodisc-report/1"},
                  {"kind", "transforms-check"},
                  {"monomial_degree", degree},
                  {"random_samples", samples},
                  {"schwarz_modes", modes},
                  {"criteria", criteria},
                  {"pass", res.pass}};
    res.summary = sum.str();
    return res;
}

inline ExperimentResult run_solve(const ExperimentConfig& cfg) {
    ProblemSpec spec = problem_from_json(cfg.raw);
    if (cfg.raw.contains("tol")) spec.tol = cfg.tol;
    const GridPtr grid = make_disc_grid(cfg.n_radial, cfg.n_angular);

    if (!spec.phi.is_real(1e-10)) throw ValidationError("solve: boundary data must be real-valued");
    if (spec.A.sup_bound() > 0.5) throw ValidationError("solve: structure exceeds the admissibility gate");
    if (spec.anchor.size() != spec.A.n()) throw ValidationError("solve: anchor dimension mismatch");

    SolverOptions opt;
    opt.tol = spec.tol;
    opt.method = spec.method;
    const SolverReport rep = solve_rh(
        RHProblem{spec.A, spec.phi, spec.anchor, spec.zero_arc, spec.zero_arc_tol}, opt, grid);

    ExperimentResult res;
    res.report = {{"schema", "holodisc-report/1"}, {"kind", "solve"}};
    res.report.update(report_to_json(rep));

    bool pass = rep.converged && rep.final_residual <= spec.tol;
    std::ostringstream sum;
    sum << "solve (" << to_string(spec.method) << ")\n";
    summary_line(sum, "final_residual", rep.final_residual, spec.tol, rep.final_residual <= spec.tol);
    summary_line(sum, "boundary_error", rep.boundary_error, spec.tol, rep.boundary_error <= spec.tol);
    summary_line(sum, "anchor_error", rep.anchor_error, spec.tol, rep.anchor_error <= spec.tol);

    // Linear case: the solution must match T_SW(phi) + i a.
    const CMat A0 = spec.A(CVec::Zero(spec.A.n()));
    const bool is_zero_structure = spec.A.sup_bound() == 0.0;
    if (is_zero_structure) {
        PolyMap lin = schwarz(spec.phi.real_part());
        for (int c = 0; c < lin.n(); ++c) lin[c].add_coeff(0, 0, Complex(0.0, spec.anchor(c)));
        double err = 0.0;
        const PolyMap diff = rep.solution->spectral() - lin;
        for (size_t idx = 0; idx < grid->node_count(); ++idx) {
            const Complex z = grid->node(idx);
            for (int c = 0; c < diff.n(); ++c) err = std::max(err, std::abs(diff[c].eval(z)));
        }
        res.report["linear_match_error"] = err;
        const bool ok = err <= 1e-8;
        summary_line(sum, "linear_match_error", err, 1e-8, ok);
        pass = pass && ok;
    } else if (spec.A.n() == 1 && spec.A.poly() == nullptr && std::abs(A0(0, 0).imag()) < 1e-15) {
        // Constant real scalar structure: closed form u = f + A conj f,
        // f = T_SW(phi)/(1+A) + i a/(1-A).
        const double a0 = A0(0, 0).real();
        PolyMap f = schwarz(spec.phi.real_part());
        f *= 1.0 / (1.0 + a0);
        f[0].add_coeff(0, 0, Complex(0.0, spec.anchor(0) / (1.0 - a0)));
        const PolyMap closed = f + Complex(a0) * f.conjugated();
        double err = 0.0;
        const PolyMap diff = rep.solution->spectral() - closed;
        for (size_t idx = 0; idx < grid->node_count(); ++idx)
            err = std::max(err, std::abs(diff[0].eval(grid->node(idx))));
        res.report["closed_form_error"] = err;
        const bool ok = err <= 1e-8;
        summary_line(sum, "closed_form_error", err, 1e-8, ok);
        pass = pass && ok;
    }
    res.pass = pass;
    res.report["pass"] = pass;
    res.summary = sum.str();

    std::ostringstream csv;
    csv << "iteration,residual\n";
    for (size_t i = 0; i < rep.residual_history.size(); ++i)
        csv << i << "," << format_double(rep.residual_history[i]) << "\n";
    res.series_csv = csv.str();

    std::ostringstream dat;
    dat << "# iteration residual\n";
    for (size_t i = 0; i < rep.residual_history.size(); ++i)
        dat << i << " " << format_double(rep.residual_history[i]) << "\n";
    res.dat_files.emplace_back("residuals.dat", dat.str());
    return res;
}

inline ExperimentResult run_reflect(const ExperimentConfig& cfg) {
    const DeformationTensor A = deformation_from_json(require_field(cfg.raw, "structure"));
    const Fourier phi = fourier_from_json(require_field(cfg.raw, "boundary"));
    const double beta_tol = cfg.raw.value("beta_tol", 1e-8);
    if (A.n() != 1) throw ValidationError("reflect: scalar structures only");
    if (A.sup_bound() > 0.5) throw ValidationError("reflect: structure exceeds the admissibility gate");
    const GridPtr grid = make_disc_grid(cfg.n_radial, cfg.n_angular);

    SolverOptions opt;
    opt.tol = cfg.tol;
    const SolverReport srep = solve_rh(RHProblem{A, phi.real_part(), RVec::Zero(1)}, opt, grid);
    const HalfDiscFunction u = HalfDiscFunction::restriction(*srep.solution);
    const ReflectionReport rrep = verify_reflection(u, j_from_deformation(A), beta_tol);

    ExperimentResult res;
    res.report = {{"schema", "holodisc-report/1"},
                  {"kind", "reflect"},
                  {"solve_residual", srep.final_residual},
                  {"base_residual", rrep.base_residual},
                  {"reflected_residual", rrep.reflected_residual},
                  {"beta_imag_sup", rrep.beta_imag_sup},
                  {"ext_projection_residual", rrep.ext_projection_residual},
                  {"pass", rrep.pass}};
    std::ostringstream sum;
    sum << "reflect\n";
    summary_line(sum, "reflected_residual", rrep.reflected_residual,
                 std::max(10.0 * rrep.base_residual, 1e-11), rrep.pass);
    res.summary = sum.str();
    res.pass = rrep.pass;
    return res;
}

inline ExperimentResult run_analyticity(const ExperimentConfig& cfg) {
    const DeformationTensor A = deformation_from_json(require_field(cfg.raw, "structure"));
    const Fourier phi = fourier_from_json(require_field(cfg.raw, "boundary"));
    if (A.sup_bound() > 0.5) throw ValidationError("analyticity: structure exceeds the admissibility gate");
    AnalyticityOptions opts;
    opts.solve_tol = cfg.tol;
    opts.pass_tol = cfg.raw.value("pass_tol", 1e-6);
    opts.strip_radius = cfg.raw.value("strip_radius", 0.35);
    const GridPtr grid = make_disc_grid(cfg.n_radial, cfg.n_angular);
    const AnalyticityReport rep = analyticity_experiment(A, phi, grid, opts);

    ExperimentResult res;
    res.report = {{"schema", "holodisc-report/1"},
                  {"kind", "analyticity"},
                  {"solve_residual", rep.solve_residual},
                  {"beta_imag_sup", rep.beta_imag_sup},
                  {"pullback_residual", rep.pullback_residual},
                  {"resolve_residual", rep.resolve_residual},
                  {"disagreement", rep.disagreement},
                  {"pass_tol", opts.pass_tol},
                  {"pass", rep.pass}};
    std::ostringstream sum;
    sum << "analyticity\n";
    summary_line(sum, "disagreement", rep.disagreement, opts.pass_tol, rep.pass);
    res.summary = sum.str();
    res.pass = rep.pass;
    return res;
}

inline ExperimentResult run_lift_check(const ExperimentConfig& cfg) {
    const int samples = cfg.raw.value("samples", 100);
    const double square_tol = cfg.raw.value("square_tol", 1e-12);
    const double ratio_max = cfg.raw.value("ratio_max", 10.0);
    if (samples < 1) throw ValidationError("lift-check: samples must be positive");

    AlmostComplexStructure J = cfg.raw.contains("acs")
                                   ? acs_from_json(cfg.raw.at("acs"))
                                   : j_from_deformation(deformation_from_json(
                                         require_field(cfg.raw, "structure")));
    const AlmostComplexStructure Jc = lift_structure(J);

    double worst_sq = 0.0;
    for (const CVec& w : sample_points(2 * J.n(), samples, 0.9, static_cast<unsigned>(cfg.seed))) {
        const RMat M = Jc(w);
        worst_sq = std::max(
            worst_sq, detail::operator_norm(RMat(M * M + RMat::Identity(M.rows(), M.cols()))));
    }

    // Lifted residual of a converged solution.
    const json solve_cfg = cfg.raw.value("solve", json::object());
    const DeformationTensor As =
        solve_cfg.contains("structure") ? deformation_from_json(solve_cfg.at("structure"))
                                        : DeformationTensor::constant_scalar(0.25);
    const Fourier phi = solve_cfg.contains("boundary") ? fourier_from_json(solve_cfg.at("boundary"))
                                                       : Fourier::cosine(1);
    const GridPtr grid = make_disc_grid(cfg.n_radial, cfg.n_angular);
    SolverOptions opt;
    opt.tol = cfg.tol;
    const SolverReport srep = solve_rh(RHProblem{As, phi.real_part(), RVec::Zero(As.n())}, opt, grid);
    const AlmostComplexStructure Js = j_from_deformation(As);
    const double base = j_holomorphy_residual(*srep.solution, Js);
    const double lifted = j_holomorphy_residual(lift_map(*srep.solution).uc, lift_structure(Js));
    const double denom = std::max(base, 1e-13);
    const bool ratio_ok = lifted <= ratio_max * denom;

    ExperimentResult res;
    const bool sq_ok = worst_sq <= square_tol;
    res.pass = sq_ok && ratio_ok;
    res.report = {{"schema", "holodisc-report/1"},
                  {"kind", "lift-check"},
                  {"samples", samples},
                  {"max_square_defect", worst_sq},
                  {"square_tol", square_tol},
                  {"base_residual", base},
                  {"lifted_residual", lifted},
                  {"ratio_max", ratio_max},
                  {"pass", res.pass}};
    std::ostringstream sum;
    sum << "lift-check\n";
    summary_line(sum, "max_square_defect", worst_sq, square_tol, sq_ok);
    summary_line(sum, "lifted_residual", lifted, ratio_max * denom, ratio_ok);
    res.summary = sum.str();
    return res;
}

inline ExperimentResult run_converge(const ExperimentConfig& cfg) {
    const DeformationTensor A = deformation_from_json(require_field(cfg.raw, "structure"));
    const Fourier phi = fourier_from_json(require_field(cfg.raw, "boundary")).real_part();
    const json sched = cfg.raw.value("schedule", json{{"from", 4}, {"to", 32}});
    const int from = sched.value("from", 4);
    const int to = sched.value("to", 32);
    const double alpha = cfg.raw.value("alpha", 0.5);
    const int k = cfg.raw.value("k", 0);
    const double exponent_min = cfg.raw.value("exponent_min", 0.9);
    if (from < 1 || to <= from) throw ValidationError("converge: bad schedule");
    if (A.sup_bound() > 0.5) throw ValidationError("converge: structure exceeds the admissibility gate");
    RVec anchor = RVec::Zero(A.n());
    if (cfg.raw.contains("anchor")) {
        const auto& av = cfg.raw.at("anchor");
        if (static_cast<int>(av.size()) != A.n()) throw ValidationError("converge: anchor dimension mismatch");
        for (int i = 0; i < A.n(); ++i) anchor(i) = av[static_cast<size_t>(i)].get<double>();
    }

    std::vector<DeformationTensor> As;
    std::vector<int> ns;
    for (int nn = from; nn <= to; ++nn) {
        ns.push_back(nn);
        const double scale = 1.0 - 1.0 / static_cast<double>(nn);
        if (const Poly* p = A.poly()) As.push_back(DeformationTensor::polynomial(scale * (*p)));
        else As.push_back(DeformationTensor::callable(A.n(), [A, scale](const CVec& z) {
            return CMat(scale * A(z));
        }));
    }

    const GridPtr grid = make_disc_grid(cfg.n_radial, cfg.n_angular);
    SolverOptions opt;
    opt.tol = cfg.tol;
    const RegularityIndex idx{k, alpha, 2.0};
    const ConvergenceReport rep =
        convergence_study(As, A, phi, anchor, idx, opt, grid, cfg.threads);

    const bool exp_ok = rep.exponent >= exponent_min;
    ExperimentResult res;
    res.pass = exp_ok && rep.monotone_decreasing;
    json pts = json::array();
    for (size_t i = 0; i < rep.points.size(); ++i)
        pts.push_back({{"n", ns[i]}, {"d", rep.points[i].d}, {"e", rep.points[i].e}});
    res.report = {{"schema", "holodisc-report/1"},
                  {"kind", "converge"},
                  {"points", pts},
                  {"fitted_constant", rep.fitted_constant},
                  {"exponent", rep.exponent},
                  {"monotone_decreasing", rep.monotone_decreasing},
                  {"exponent_min", exponent_min},
                  {"pass", res.pass}};
    std::ostringstream sum;
    sum << "converge\n";
    summary_line(sum, "exponent", rep.exponent, exponent_min, exp_ok);
    sum << (rep.monotone_decreasing ? "PASS" : "FAIL") << "  e_n monotone decreasing\n";
    res.summary = sum.str();

    std::ostringstream csv;
    csv << "n,d_n,e_n,fitted_C,exponent\n";
    for (size_t i = 0; i < rep.points.size(); ++i)
        csv << ns[i] << "," << format_double(rep.points[i].d) << "," << format_double(rep.points[i].e)
            << "," << format_double(rep.fitted_constant) << "," << format_double(rep.exponent) << "\n";
    res.series_csv = csv.str();

    std::ostringstream dat;
    dat << "# d_n e_n\n";
    for (const auto& p : rep.points)
        dat << format_double(p.d) << " " << format_double(p.e) << "\n";
    res.dat_files.emplace_back("rate.dat", dat.str());
    return res;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.kind == "transforms-check") return detail::run_transforms_check(cfg);
    if (cfg.kind == "solve") return detail::run_solve(cfg);
    if (cfg.kind == "reflect") return detail::run_reflect(cfg);
    if (cfg.kind == "analyticity") return detail::run_analyticity(cfg);
    if (cfg.kind == "lift-check") return detail::run_lift_check(cfg);
    if (cfg.kind == "converge") return detail::run_converge(cfg);
    throw ParseError("unknown experiment kind: " + cfg.kind);
}

}  // namespace holodisc
