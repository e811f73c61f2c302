#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "holodisc/acs.hpp"
#include "holodisc/fourier.hpp"
#include "holodisc/grid.hpp"
#include "holodisc/rh_solver.hpp"

namespace holodisc {

using json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fixed-width float formatting used in all text outputs (17 significant
/// digits round-trips doubles exactly).
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// GridFunction spectral form: {n, degree_cap, coefficients: [[k,l,re,im],...]}
// (components nested under "coefficients" per component when n > 1).

inline json spectral_to_json(const PolyMap& p, int degree_cap) {
    const auto one = [](const Poly& q) {
        json terms = json::array();
        for (int k = 0; k <= q.max_k(); ++k)
            for (int l = 0; l <= q.max_l(); ++l) {
                const Complex c = q.coeff(k, l);
                if (c != 0.0) terms.push_back({k, l, c.real(), c.imag()});
            }
        return terms;
    };
    json j;
    j["n"] = p.n();
    j["degree_cap"] = degree_cap;
    if (p.n() == 1) {
        j["coefficients"] = one(p[0]);
    } else {
        json comps = json::array();
        for (int c = 0; c < p.n(); ++c) comps.push_back(one(p[c]));
        j["coefficients"] = comps;
    }
    return j;
}

inline json to_json(const GridFunction& f) {
    const GridFunction g = f.has_spectral() ? f : f.projected();
    return spectral_to_json(g.spectral(), g.grid()->max_degree());
}

inline PolyMap spectral_from_json(const json& j) {
    if (!j.contains("n") || !j.contains("coefficients")) throw ParseError("spectral: missing n/coefficients");
    const int n = j.at("n").get<int>();
    const auto one = [](const json& terms) {
        Poly p;
        for (const auto& t : terms) {
            if (!t.is_array() || t.size() != 4) throw ParseError("spectral: term must be [k,l,re,im]");
            p.add_coeff(t[0].get<int>(), t[1].get<int>(), Complex(t[2].get<double>(), t[3].get<double>()));
        }
        return p;
    };
    PolyMap p(n);
    if (n == 1) {
        p[0] = one(j.at("coefficients"));
    } else {
        const auto& comps = j.at("coefficients");
        if (static_cast<int>(comps.size()) != n) throw ParseError("spectral: component count mismatch");
        for (int c = 0; c < n; ++c) p[c] = one(comps[static_cast<size_t>(c)]);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Boundary data: {modes: [[m,re,im],...], n?, components nested when n > 1}

inline json to_json(const Fourier& f) {
    json j;
    j["n"] = f.n();
    const auto one = [&f](int comp) {
        json modes = json::array();
        for (int m = -f.max_mode(); m <= f.max_mode(); ++m) {
            const Complex c = f.coeff(m, comp);
            if (c != 0.0) modes.push_back({m, c.real(), c.imag()});
        }
        return modes;
    };
    if (f.n() == 1) {
        j["modes"] = one(0);
    } else {
        json comps = json::array();
        for (int c = 0; c < f.n(); ++c) comps.push_back(one(c));
        j["modes"] = comps;
    }
    return j;
}

inline Fourier fourier_from_json(const json& j) {
    const int n = j.contains("n") ? j.at("n").get<int>() : 1;
    Fourier f(n, 1);
    const auto read = [&f](const json& modes, int comp) {
        for (const auto& t : modes) {
            if (!t.is_array() || t.size() != 3) throw ParseError("boundary: mode must be [m,re,im]");
            f.add_coeff(t[0].get<int>(), comp, Complex(t[1].get<double>(), t[2].get<double>()));
        }
    };
    const auto& modes = j.at("modes");
    if (n == 1) read(modes, 0);
    else {
        if (static_cast<int>(modes.size()) != n) throw ParseError("boundary: component count mismatch");
        for (int c = 0; c < n; ++c) read(modes[static_cast<size_t>(c)], c);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Structure definitions.
//   deformation: {"kind":"constant","n":1,"value":[[re,im],...]} (row-major)
//                {"kind":"polynomial","terms":[[k,l,re,im],...],"radius":1.0}
//   acs:         {"kind":"constant","n":1,"entries":[...2n x 2n row-major...]}
//                {"kind":"polynomial","entries":[4 term lists],"radius":1.0}

inline DeformationTensor deformation_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        const int n = j.contains("n") ? j.at("n").get<int>() : 1;
        const auto& v = j.at("value");
        if (static_cast<int>(v.size()) != n * n) throw ParseError("deformation: value must be n^2 entries");
        CMat A(n, n);
        for (int i = 0; i < n * n; ++i) {
            const auto& e = v[static_cast<size_t>(i)];
            A(i / n, i % n) = Complex(e[0].get<double>(), e[1].get<double>());
        }
        return DeformationTensor::constant(A);
    }
    if (kind == "polynomial") {
        Poly p;
        for (const auto& t : j.at("terms"))
            p.add_coeff(t[0].get<int>(), t[1].get<int>(), Complex(t[2].get<double>(), t[3].get<double>()));
        const double radius = j.contains("radius") ? j.at("radius").get<double>() : 1.0;
        return DeformationTensor::polynomial(p, radius);
    }
    throw ParseError("deformation: unknown kind '" + kind + "'");
}

inline json to_json(const DeformationTensor& A) {
    json j;
    if (const Poly* p = A.poly()) {
        j["kind"] = "polynomial";
        json terms = json::array();
        for (int k = 0; k <= p->max_k(); ++k)
            for (int l = 0; l <= p->max_l(); ++l) {
                const Complex c = p->coeff(k, l);
                if (c != 0.0) terms.push_back({k, l, c.real(), c.imag()});
            }
        j["terms"] = terms;
        j["radius"] = A.domain_radius();
        return j;
    }
    j["kind"] = "constant";
    j["n"] = A.n();
    json v = json::array();
    const CMat M = A(CVec::Zero(A.n()));
    for (int i = 0; i < A.n(); ++i)
        for (int c = 0; c < A.n(); ++c) v.push_back({M(i, c).real(), M(i, c).imag()});
    j["value"] = v;
    return j;
}

inline AlmostComplexStructure acs_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        const int n = j.contains("n") ? j.at("n").get<int>() : 1;
        const auto& v = j.at("entries");
        if (static_cast<int>(v.size()) != 4 * n * n) throw ParseError("acs: entries must be (2n)^2 numbers");
        RMat J(2 * n, 2 * n);
        for (int i = 0; i < 4 * n * n; ++i) J(i / (2 * n), i % (2 * n)) = v[static_cast<size_t>(i)].get<double>();
        return AlmostComplexStructure::constant(J);
    }
    if (kind == "polynomial") {
        const auto& e = j.at("entries");
        if (e.size() != 4) throw ParseError("acs: polynomial kind needs 4 entry term lists");
        std::array<Poly, 4> entries;
        for (size_t i = 0; i < 4; ++i)
            for (const auto& t : e[i])
                entries[i].add_coeff(t[0].get<int>(), t[1].get<int>(),
                                     Complex(t[2].get<double>(), t[3].get<double>()));
        const double radius = j.contains("radius") ? j.at("radius").get<double>() : 1.0;
        return AlmostComplexStructure::polynomial(entries, Smoothness{}, radius);
    }
    throw ParseError("acs: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Problem files.

struct ProblemSpec {
    DeformationTensor A;
    Fourier phi;
    RVec anchor;
    ZeroArc zero_arc = ZeroArc::none;
    double zero_arc_tol = 1e-5;
    SolveMethod method = SolveMethod::newton;
    double tol = 1e-9;
};

inline ProblemSpec problem_from_json(const json& j) {
    ProblemSpec p{deformation_from_json(j.at("structure")), fourier_from_json(j.at("boundary")),
                  RVec()};
    const auto& anchor = j.at("anchor");
    p.anchor = RVec::Zero(static_cast<int>(anchor.size()));
    for (int i = 0; i < p.anchor.size(); ++i) p.anchor(i) = anchor[static_cast<size_t>(i)].get<double>();
    if (j.contains("method")) {
        const std::string m = j.at("method").get<std::string>();
        if (m == "newton") p.method = SolveMethod::newton;
        else if (m == "picard") p.method = SolveMethod::picard;
        else throw ParseError("problem: unknown method '" + m + "'");
    }
    if (j.contains("tol")) p.tol = j.at("tol").get<double>();
    if (j.contains("zero_arc")) {
        const std::string z = j.at("zero_arc").get<std::string>();
        if (z == "none") p.zero_arc = ZeroArc::none;
        else if (z == "upper") p.zero_arc = ZeroArc::upper;
        else if (z == "lower") p.zero_arc = ZeroArc::lower;
        else throw ParseError("problem: unknown zero_arc '" + z + "'");
    }
    if (j.contains("zero_arc_tol")) p.zero_arc_tol = j.at("zero_arc_tol").get<double>();
    return p;
}

inline json report_to_json(const SolverReport& rep) {
    json j;
    j["method"] = to_string(rep.method);
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["final_residual"] = rep.final_residual;
    j["refined_residual"] = rep.refined_residual;
    j["boundary_error"] = rep.boundary_error;
    j["anchor_error"] = rep.anchor_error;
    j["projection_residual"] = rep.projection_residual;
    j["residual_history"] = rep.residual_history;
    json norms = json::object();
    for (const auto& [name, value] : rep.norms) norms[name] = value;
    j["norms"] = norms;
    if (rep.solution) j["solution"] = to_json(*rep.solution);
    return j;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("JSON parse failure in ") + path + ": " + ex.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace holodisc
