#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include "wiener/io.hpp"
#include "wiener/wiener.hpp"

namespace wiener::cli {

using io::fmt;
using io::json;

// Typed access to a params object with field paths for schema errors.
class Params {
public:
    Params(json j, std::string path, std::filesystem::path base = {})
        : j_(std::move(j)), path_(std::move(path)), base_(std::move(base)) {
        if (!j_.is_object()) throw SchemaError(path_, "expected an object");
    }

    bool has(const std::string& k) const { return j_.contains(k) && !j_[k].is_null(); }
    std::string at(const std::string& k) const { return path_ + "." + k; }

    double num(const std::string& k) const { return io::parse_number(io::field(j_, k, path_), at(k)); }
    double num(const std::string& k, double def) const { return has(k) ? num(k) : def; }

    std::int64_t integer(const std::string& k) const { return io::parse_int(io::field(j_, k, path_), at(k)); }
    std::int64_t integer(const std::string& k, std::int64_t def) const { return has(k) ? integer(k) : def; }

    bool flag(const std::string& k, bool def) const {
        if (!has(k)) return def;
        if (!j_[k].is_boolean()) throw SchemaError(at(k), "expected a boolean");
        return j_[k].get<bool>();
    }

    std::string str(const std::string& k) const {
        const auto& v = io::field(j_, k, path_);
        if (!v.is_string()) throw SchemaError(at(k), "expected a string");
        return v.get<std::string>();
    }
    std::string str(const std::string& k, const std::string& def) const { return has(k) ? str(k) : def; }

    Rational rational(const std::string& k) const {
        const auto& v = io::field(j_, k, path_);
        if (v.is_string()) {
            try {
                return parse_rational(v.get<std::string>());
            } catch (const std::exception&) {
                throw SchemaError(at(k), "malformed rational");
            }
        }
        return rational_from_double(num(k));
    }

    // Inline object, or a string naming a JSON file relative to the config.
    json object(const std::string& k) const {
        const auto& v = io::field(j_, k, path_);
        if (v.is_string()) {
            std::filesystem::path p(v.get<std::string>());
            if (p.is_relative() && !base_.empty()) p = base_ / p;
            return io::read_json(p.string());
        }
        if (!v.is_object()) throw SchemaError(at(k), "expected an object or a file name");
        return v;
    }

    // Nested params; file references inside resolve against that file's directory.
    Params child(const std::string& k) const {
        std::filesystem::path b = base_;
        const auto& v = io::field(j_, k, path_);
        if (v.is_string()) {
            std::filesystem::path p(v.get<std::string>());
            if (p.is_relative() && !base_.empty()) p = base_ / p;
            b = p.parent_path();
        }
        return Params(object(k), at(k), b);
    }

    std::vector<std::int64_t> int_list(const std::string& k, std::vector<std::int64_t> def) const {
        if (!has(k)) return def;
        const auto& v = j_[k];
        if (!v.is_array()) throw SchemaError(at(k), "expected an array");
        std::vector<std::int64_t> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(io::parse_int(v[i], at(k) + "[" + std::to_string(i) + "]"));
        return out;
    }

    const json& raw() const { return j_; }
    const std::filesystem::path& base() const { return base_; }

private:
    json j_;
    std::string path_;
    std::filesystem::path base_;
};

// Everything a pipeline emits.
struct Artifacts {
    json certs = json::object();
    json checks = json::array();
    std::vector<std::string> failed;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, json>> files;

    void check(const std::string& name, bool ok, double lhs, double rhs, const std::string& rel = "<=") {
        checks.push_back({{"name", name}, {"pass", ok}, {"lhs", fmt(lhs)}, {"relation", rel}, {"rhs", fmt(rhs)}});
        if (!ok) failed.push_back(name + ": " + fmt(lhs) + " " + rel + " " + fmt(rhs));
    }
    void row(std::vector<std::string> r) { rows.push_back(std::move(r)); }
    void file(const std::string& name, json j) { files.emplace_back(name, std::move(j)); }
};

inline std::string b2s(bool b) { return b ? "true" : "false"; }

inline std::string verdict_name(SignVerdict v) {
    switch (v) {
        case SignVerdict::positive: return "positive";
        case SignVerdict::negative: return "negative";
        case SignVerdict::mixed: return "mixed";
        default: return "unknown";
    }
}

inline std::vector<std::int64_t> doubling_ladder(std::int64_t dmax) {
    require(dmax >= 0, "degree ladder needs dmax >= 0");
    std::vector<std::int64_t> ds{0};
    for (std::int64_t d = 1; d < dmax; d *= 2) ds.push_back(d);
    if (dmax > 0) ds.push_back(dmax);
    return ds;
}

inline json rational_measure_json(const RationalMeasure& m) {
    json pos = json::array(), mass = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        pos.push_back(rational_to_string(m.positions[i]));
        mass.push_back(rational_to_string(m.masses[i]));
    }
    return {{"positions", pos}, {"masses", mass}};
}

// ---- phi

inline void pipeline_phi(const Params& P, Artifacts& A) {
    const double q = P.num("q"), gamma = P.num("gamma");
    auto r = build_phi(q, gamma);
    json phi = io::to_json(r.phi);
    phi["k"] = r.k;
    phi["sign_rule"] = to_string(r.q_cert.rule);
    A.file("phi.json", phi);
    A.certs["k"] = r.k;
    A.certs["sign_rule"] = to_string(r.q_cert.rule);
    A.certs["sup_method"] = r.q_cert.method;
    A.certs["attempts"] = r.q_cert.attempts;
    A.check("phi_hat(0) == 0", r.phi[0] == Complex{}, std::abs(r.phi[0]), 0.0, "==");
    A.check("|L2 - 1/2| <= 1e-12", std::fabs(r.l2 - 0.5) <= 1e-12, std::fabs(r.l2 - 0.5), 1e-12);
    A.check("sup|phi| <= 1 + 1e-9", r.sup_bound <= 1.0 + 1e-9, r.sup_bound, 1.0 + 1e-9);
    A.check("A_q < gamma", r.aq < gamma, r.aq, gamma, "<");
    A.header = {"quantity", "value"};
    A.row({"k", std::to_string(r.k)});
    A.row({"degree", std::to_string(r.phi.degree())});
    A.row({"a_q", fmt(r.aq)});
    A.row({"a_q_closed_form", fmt(r.aq_closed)});
    A.row({"l2", fmt(r.l2)});
    A.row({"a_1", fmt(r.a1)});
    A.row({"sup_bound", fmt(r.sup_bound)});
    A.row({"q_sup_bound", fmt(r.q_cert.bound)});
    A.row({"q_target", fmt(r.q_cert.target)});
}

// ---- kahane

inline void pipeline_kahane(const Params& P, Artifacts& A) {
    const Rational a = P.rational("a"), b = P.rational("b");
    const double delta = P.num("delta");
    const auto kmax = P.integer("kmax", 200);
    require(kmax >= 0 && kmax <= 100000, "kahane: kmax in [0, 100000]");
    auto r = build_rho(a, b, delta);
    auto mom = moments(r.rho, static_cast<unsigned>(kmax));
    json m = rational_measure_json(r.rho);
    m["schema_version"] = io::kSchemaVersion;
    m["a"] = rational_to_string(a);
    m["b"] = rational_to_string(b);
    m["n"] = r.n;
    m["h"] = rational_to_string(r.h);
    A.file("measure.json", m);
    bool exact_zero = true;
    double worst = 0.0;
    A.header = {"k", "moment", "abs_moment", "below_delta", "exact_zero"};
    for (std::int64_t k = 0; k <= kmax; ++k) {
        const auto& v = mom[static_cast<std::size_t>(k)];
        const double d = std::fabs(to_double(v));
        const bool z = v == 0;
        if (k >= 1 && k <= r.n - 1) exact_zero = exact_zero && z;
        if (k >= 1) worst = std::max(worst, d);
        A.row({std::to_string(k), fmt(to_double(v)), fmt(d), b2s(k == 0 || d < delta), b2s(z)});
    }
    A.certs["n"] = r.n;
    A.certs["c_I"] = fmt(r.c_I);
    A.certs["tv"] = fmt(to_double(r.tv));
    A.certs["tv_exact"] = rational_to_string(r.tv);
    A.certs["delta_power"] = fmt(r.delta_power);
    A.check("moment 0 == 1", mom[0] == 1, to_double(mom[0]), 1.0, "==");
    A.check("moments 1..n-1 exactly zero", exact_zero, exact_zero ? 0.0 : 1.0, 0.0, "==");
    A.check("max_{1<=k<=kmax} |moment k| < delta", worst < delta, worst, delta, "<");
    A.check("TV <= (2eb/(b-a))^{n-1}", r.tv_within_bound, to_double(r.tv), r.tv_bound);
}

// ---- bernstein

inline void tail_rows(Artifacts& A, const std::string& name, const std::string& type, const DiscreteProbSpace& S,
                      const RandomVariables& X, double eps_hat, const std::vector<double>& alphas, int& bad) {
    const int N = static_cast<int>(X.size());
    for (double alpha : alphas) {
        const double tail = tail_probability(S, X, alpha);
        const double bound = bernstein_bound(N, alpha, eps_hat);
        const bool ok = tail <= bound;
        bad += ok ? 0 : 1;
        A.row({name, type, std::to_string(N), fmt(alpha), fmt(eps_hat), fmt(tail), fmt(bound), b2s(ok)});
    }
}

inline std::vector<double> alpha_grid(const Params& P) {
    if (!P.has("alphas")) {
        std::vector<double> a;
        for (int k = 1; k <= 20; ++k) a.push_back(0.05 * k);
        return a;
    }
    const auto& v = P.raw()["alphas"];
    if (!v.is_array()) throw SchemaError(P.at("alphas"), "expected an array");
    std::vector<double> a;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = io::parse_number(v[i], P.at("alphas") + "[" + std::to_string(i) + "]");
        if (!(x > 0.0)) throw SchemaError(P.at("alphas") + "[" + std::to_string(i) + "]", "alpha must be positive");
        a.push_back(x);
    }
    return a;
}

inline DRieszSpec riesz_spec_from(const Params& P) {
    DRieszSpec s;
    s.phi = io::poly_from_json(P.object("phi"), P.at("phi"));
    s.w = P.has("w") ? io::poly_from_json(P.object("w"), P.at("w")) : Poly::constant(1.0);
    s.N = static_cast<int>(P.integer("N"));
    const auto nu = P.integer("nu", 0);
    s.nu = nu > 0 ? nu : choose_nu(s.phi.effective_degree(), s.w.effective_degree(), s.N);
    s.validate();
    return s;
}

inline void pipeline_bernstein(const Params& P, Artifacts& A) {
    const auto& bat = io::field(P.raw(), "battery", "$.params");
    if (!bat.is_array() || bat.empty()) throw SchemaError(P.at("battery"), "expected a nonempty array");
    A.header = {"case", "type", "N", "alpha", "eps_hat", "exact_tail", "bound", "ok"};
    int bad = 0;
    json cases = json::array();
    for (std::size_t i = 0; i < bat.size(); ++i) {
        Params C(bat[i], P.at("battery") + "[" + std::to_string(i) + "]", P.base());
        const std::string type = C.str("type");
        const std::string name = C.str("name", type + std::to_string(i));
        const auto alphas = alpha_grid(C);
        if (type == "coins") {
            const int N = static_cast<int>(C.integer("N"));
            auto [S, X] = biased_coins(N, C.num("p_plus"));
            auto m = check_almost_multiplicative(S, X, 1.0);
            tail_rows(A, name, type, S, X, m.max_relative_deviation, alphas, bad);
            cases.push_back({{"case", name}, {"mu", fmt(m.mu)}, {"eps_hat", fmt(m.max_relative_deviation)}});
        } else if (type == "riesz") {
            auto spec = riesz_spec_from(C);
            const double s = C.num("s");
            auto rp = riesz_probability(spec, s, C.integer("grid", 0));
            auto m = check_almost_multiplicative(rp.space, rp.X, 1.0);
            tail_rows(A, name, type, rp.space, rp.X, m.max_relative_deviation, alphas, bad);
            cases.push_back({{"case", name},
                             {"mu", fmt(m.mu)},
                             {"eps_hat", fmt(m.max_relative_deviation)},
                             {"nu", spec.nu},
                             {"grid", rp.grid},
                             {"normalization_deviation", fmt(rp.normalization_deviation)},
                             {"min_lambda", fmt(rp.min_lambda)},
                             {"lambda_lower_bound", fmt(rp.lambda_lower_bound)}});
        } else {
            throw SchemaError(C.at("type"), "unknown case type '" + type + "' (coins | riesz)");
        }
    }
    A.certs["cases"] = cases;
    A.check("counterexamples == 0", bad == 0, bad, 0.0, "==");
}

// ---- riesz

inline std::string subset_name(std::uint64_t mask, int N) {
    std::string s = "{";
    for (int j = 1; j <= N; ++j)
        if ((mask >> (j - 1)) & 1u) s += (s.size() > 1 ? " " : "") + std::to_string(j);
    return s + "}";
}

inline void pipeline_riesz(const Params& P, Artifacts& A) {
    const Params S = P.child("spec");
    auto spec = riesz_spec_from(S);
    const std::string check = P.str("check");
    A.certs["nu"] = spec.nu;
    A.certs["lambda_degree"] = spec.lambda_degree();
    if (check == "moments") {
        require(spec.N <= 20, "riesz moments: N <= 20 for the exhaustive subset loop");
        const bool exact = S.flag("exact", P.flag("exact", false));
        const std::uint64_t subsets = (std::uint64_t{1} << spec.N) - 1;
        double worst = 0.0;
        bool all_equal = true;
        A.header = {"subset", "lhs", "rhs", "abs_error", "exact_equal"};
        if (exact) {
            QRieszSpec qs{to_exact_poly(spec.phi), to_exact_poly(spec.w), spec.N, spec.nu};
            const QComplex s(P.rational("s"), Rational(0));
            auto lam = riesz_lambda(qs, s);
            for (std::uint64_t m = 1; m <= subsets; ++m) {
                auto r = verify_moment_formula(qs, s, m, &lam);
                const bool eq = r.lhs == r.rhs;
                all_equal = all_equal && eq;
                worst = std::max(worst, r.abs_error);
                A.row({subset_name(m, spec.N), rational_to_string(r.lhs.re), rational_to_string(r.rhs.re), fmt(r.abs_error), b2s(eq)});
            }
            A.check("exact lhs == rhs for all subsets", all_equal, worst, 0.0, "==");
        } else {
            const double s = P.num("s");
            for (std::uint64_t m = 1; m <= subsets; ++m) {
                auto r = verify_moment_formula_grid(spec, s, m);
                worst = std::max(worst, r.abs_error);
                A.row({subset_name(m, spec.N), fmt(r.lhs.real()), fmt(r.rhs.real()), fmt(r.abs_error), "n/a"});
            }
            A.check("max |lhs - rhs| <= 1e-10", worst <= 1e-10, worst, 1e-10);
        }
        A.certs["mode"] = exact ? "exact" : "grid";
        A.certs["max_abs_error"] = fmt(worst);
    } else if (check == "concentration") {
        const bool theoretical = S.flag("theoretical", P.flag("theoretical", false));
        const double c1 = P.num("c1", S.num("c1", theoretical ? 2e-5 : 0.05));
        const double s = P.num("s");
        auto r = l2_concentration_check(spec, s, c1, theoretical);
        A.header = {"N", "s", "c1", "lhs_lo", "lhs_hi", "rhs", "c2", "holds", "relaxed"};
        A.row({std::to_string(spec.N), fmt(s), fmt(c1), fmt(r.lhs_enclosure.lo), fmt(r.lhs_enclosure.hi), fmt(r.rhs), fmt(r.c2),
               b2s(r.holds), b2s(r.relaxed)});
        A.certs["mode"] = theoretical ? "theoretical" : "empirical";
        A.certs["expectation_X"] = fmt(r.expectation_X);
        A.certs["sublevel_arcs"] = r.arcs;
        // In empirical mode the comparison is reported, not asserted.
        if (theoretical) A.check("int_{X<c1} lambda^2 <= 2 exp(-c2 N)", r.holds, r.lhs_enclosure.hi, r.rhs);
        else A.certs["holds"] = r.holds;
    } else {
        throw SchemaError(P.at("check"), "expected 'moments' or 'concentration'");
    }
}

// ---- principal

inline PrincipalConfig principal_config(const Params& P) {
    PrincipalConfig c;
    c.q = P.num("q", c.q);
    c.eps = P.num("eps", c.eps);
    if (P.has("u")) c.u = io::poly_from_json(P.object("u"), P.at("u"));
    c.N = static_cast<int>(P.integer("N", c.N));
    c.theoretical = P.flag("theoretical", c.theoretical);
    if (c.theoretical) {
        auto t = theoretical_constants(c.q);
        c.c1 = t.c1;
        c.c5 = t.c5;
        c.gamma = t.gamma;
        c.c4 = t.c4;
    }
    c.c1 = P.num("c1", c.c1);
    c.c4 = P.num("c4", c.c4);
    c.c5 = P.num("c5", c.c5);
    c.gamma = P.num("gamma", c.gamma);
    c.mollifier_order = static_cast<int>(P.integer("mollifier_order", c.mollifier_order));
    c.mollifier_fraction = P.num("mollifier_fraction", c.mollifier_fraction);
    c.nu = P.integer("nu", c.nu);
    c.nu_offset = P.integer("nu_offset", c.nu_offset);
    c.window = P.integer("window", c.window);
    c.w_order = static_cast<int>(P.integer("w_order", c.w_order));
    c.grid_factor = static_cast<int>(P.integer("grid_factor", c.grid_factor));
    return c;
}

inline json principal_cert_json(const PrincipalOutput& o) {
    const auto& c = o.cert;
    json ex = json::array();
    for (double e : c.expectations) ex.push_back(fmt(e));
    return {{"nu", o.nu},
            {"delta", fmt(o.delta)},
            {"kahane_atoms", o.rho.n},
            {"phi_k", o.phi.k},
            {"w_order", o.w.order},
            {"w_relaxed", o.w.relaxed},
            {"margin", fmt(o.margin)},
            {"mollifier_R", fmt(o.chi.R)},
            {"K_measure", fmt(o.K.measure())},
            {"K_arcs", o.K.pieces().size()},
            {"a_q_defect", io::interval_json(c.a_q_defect)},
            {"lambda_defect", fmt(c.lambda_defect)},
            {"lambda_defect_bound", fmt(c.lambda_defect_bound)},
            {"l2_outside_E", fmt(c.l2_outside_E)},
            {"l2_outside_bound", fmt(c.l2_outside_bound)},
            {"h_defect_upper", fmt(c.h_defect_upper)},
            {"min_abs_P", fmt(c.min_abs_P)},
            {"min_abs_P_direct", fmt(c.min_abs_P_direct)},
            {"min_abs_P_chain", fmt(c.min_abs_P_chain)},
            {"sign_Pu", verdict_name(c.sign_Pu)},
            {"sign_X_minus_c3", verdict_name(c.sign_X_minus_c3)},
            {"a_norm_P", fmt(c.a_norm_P)},
            {"a_norm_P_exact", c.a_norm_P_exact},
            {"Cq", fmt(c.Cq)},
            {"expectations", ex},
            {"expectations_above", c.expectations_above},
            {"f_outside_max", fmt(c.f_outside_max)},
            {"f_outside_partial_max", fmt(c.f_outside_partial_max)},
            {"f_outside_partial_bound", fmt(c.f_outside_partial_bound)},
            {"f_window_err", fmt(o.f.window_err)},
            {"achieved_eps", fmt(c.achieved_eps)},
            {"all_pass", c.all_pass}};
}

inline void principal_checks(const PrincipalOutput& o, Artifacts& A, const std::string& prefix = "") {
    const auto& c = o.cert;
    A.check(prefix + "inf_K |P| > 1", c.min_abs_P > 1.0, c.min_abs_P, 1.0, ">");
    A.check(prefix + "P u > 0 on K", c.sign_Pu == SignVerdict::positive, c.sign_Pu == SignVerdict::positive ? 1.0 : 0.0, 1.0, "==");
    A.check(prefix + "||P||_A == ||phi||_A / c3 (exact)", c.a_norm_exact, c.a_norm_P, c.Cq, "==");
    A.check(prefix + "||1 - lambda||_{A_q} <= delta exp(gamma^q N / q)", c.lambda_defect_holds, c.lambda_defect,
            c.lambda_defect_bound);
    A.check(prefix + "f == 0 outside K", c.f_outside_max <= 1e-12, c.f_outside_max, 1e-12);
}

inline void principal_report(const PrincipalOutput& o, Artifacts& A) {
    const auto& c = o.cert;
    A.header = {"quantity", "lo", "hi"};
    A.row({"a_q_defect", fmt(c.a_q_defect.lo), fmt(c.a_q_defect.hi)});
    A.row({"min_abs_P", fmt(c.min_abs_P), fmt(c.min_abs_P)});
    A.row({"a_norm_P", fmt(c.a_norm_P), fmt(c.a_norm_P)});
    A.row({"lambda_defect", fmt(c.lambda_defect), fmt(c.lambda_defect_bound)});
    A.row({"l2_outside_E", fmt(c.l2_outside_E), fmt(c.l2_outside_bound)});
    A.row({"K_measure", fmt(o.K.measure()), fmt(o.K.measure())});
    A.row({"f_outside_max", fmt(c.f_outside_max), fmt(c.f_outside_max)});
}

inline void pipeline_principal(const Params& P, Artifacts& A) {
    auto cfg = principal_config(P);
    const auto win = P.integer("artifact_window", 4096);
    auto o = run_principal(cfg);
    A.file("K.json", io::to_json(o.K));
    A.file("f.json", io::to_json(o.f.truncated(win)));
    A.file("P.json", io::to_json(o.P));
    A.certs = principal_cert_json(o);
    principal_checks(o, A);
    principal_report(o, A);
}

// ---- helson

inline HelsonConfig helson_config(const Params& P) {
    HelsonConfig h;
    h.q = P.num("q", h.q);
    h.J = static_cast<int>(P.integer("stages", h.J));
    h.eps1 = P.num("eps1", h.eps1);
    h.outside_samples = static_cast<int>(P.integer("outside_samples", h.outside_samples));
    if (P.has("base")) h.base = principal_config(P.child("base"));
    h.base.q = h.q;
    h.base.window = P.integer("window", std::int64_t{1} << 22);
    if (P.has("N")) h.base.N = static_cast<int>(P.integer("N"));
    return h;
}

inline json stage_json(const StageRecord& s) {
    return {{"j", s.j},
            {"u", io::to_json(s.u)},
            {"eps_target", fmt(s.eps_target)},
            {"nu", s.stage->nu},
            {"N", s.stage->config.N},
            {"K_arcs", s.stage->K.pieces().size()},
            {"K_measure", fmt(s.stage->K.measure())},
            {"step_norm", io::interval_json(s.step_norm)},
            {"step_norm_direct", io::interval_json(s.step_norm_direct)},
            {"step_norm_product", fmt(s.step_norm_product)},
            {"S_a_norm", io::interval_json(s.S_a_norm)},
            {"step_target", fmt(s.step_target)},
            {"step_ok", s.step_ok},
            {"principal", principal_cert_json(*s.stage)}};
}

inline void helson_artifacts(const HelsonOutput& h, Artifacts& A, const Params& P) {
    json stages = json::array();
    for (const auto& s : h.stages) stages.push_back(stage_json(s));
    A.file("K.json", io::to_json(h.K));
    A.file("stages.json", {{"schema_version", io::kSchemaVersion}, {"stages", stages}});
    if (P.flag("write_series", false))
        A.file("S.json", [&] {
            json j = io::to_json(h.stages.back().S.truncated(P.integer("artifact_window", 4096)));
            j["max_outside"] = fmt(h.max_outside);
            return j;
        }());
    A.certs["stages"] = stages;
    A.certs["S_minus_1"] = io::interval_json(h.S_minus_1);
    A.certs["max_outside"] = fmt(h.max_outside);
    A.certs["outside_points"] = h.outside_points;
    A.certs["step_sum"] = fmt(h.step_sum);
    for (const auto& s : h.stages)
        A.check("stage " + std::to_string(s.j) + " ||S_j - S_{j-1}||_{A_q} < 2^{-2-j}", s.step_norm.hi < s.step_target,
                s.step_norm.hi, s.step_target, "<");
    A.check("||S_J - 1||_{A_q} < 1", h.S_minus_1.hi < 1.0, h.S_minus_1.hi, 1.0, "<");
    A.check("max |S_J| outside K < 1e-6", h.max_outside < 1e-6, h.max_outside, 1e-6, "<");
    A.header = {"stage", "nu", "eps_target", "step_lo", "step_hi", "step_target", "S_A_hi", "a_q_defect_hi"};
    for (const auto& s : h.stages)
        A.row({std::to_string(s.j), std::to_string(s.stage->nu), fmt(s.eps_target), fmt(s.step_norm.lo), fmt(s.step_norm.hi),
               fmt(s.step_target), fmt(s.S_a_norm.hi), fmt(s.stage->cert.a_q_defect.hi)});
}

inline void helson_cert_artifacts(const HelsonOutput& h, Artifacts& A, const Params& P) {
    std::vector<Poly> Ps;
    for (const auto& s : h.stages) Ps.push_back(s.stage->P);
    const int trials = static_cast<int>(P.integer("trials", 100));
    auto c = helson_certificate(h.K, Ps, trials, P.integer("cutoff", 4096), master_seed(), static_cast<int>(P.integer("max_atoms", 8)));
    A.certs["helson_certificate"] = {{"trials", trials}, {"delta_hat", fmt(c.delta_hat)}, {"worst", c.worst}, {"chain_holds", c.chain_holds}};
    A.check("delta_hat > 0", c.delta_hat > 0.0, c.delta_hat, 0.0, ">");
}

inline void pipeline_helson(const Params& P, Artifacts& A) {
    auto h = run_stages(helson_config(P));
    helson_artifacts(h, A, P);
    helson_cert_artifacts(h, A, P);
}

// ---- extension probe

inline void pipeline_extension(const Params& P, Artifacts& A) {
    const ArcSet K = io::arcset_from_json(P.object("k"), P.at("k"));
    require(!K.empty(), "extension-probe: K must be nonempty");
    const double p = P.num("p"), eps = P.num("eps");
    const auto d = P.integer("d");
    const auto pts = arc_sample_points(K, static_cast<int>(P.integer("arcs", 4)));
    const double value = P.num("value", 1.0);
    std::vector<Complex> h(pts.size(), Complex(value));
    auto r = extension_probe(K, pts, h, p, eps, d, P.num("delta_hat", 0.0));
    double resid = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) resid = std::max(resid, std::abs(eval(r.f, pts[i]) - h[i]));
    json f = io::to_json(r.f);
    json sp = json::array();
    for (double t : pts) sp.push_back(fmt(t));
    f["sample_points"] = sp;
    A.file("f.json", f);
    A.certs["points"] = pts.size();
    A.certs["a_norm"] = fmt(r.a_norm);
    A.certs["ap_norm"] = fmt(r.ap_norm);
    A.certs["objective"] = fmt(r.objective);
    A.certs["iterations"] = r.iterations;
    A.certs["guarantee"] = fmt(r.guarantee);
    A.check("interpolation residual <= 1e-8", resid <= 1e-8, resid, 1e-8);
    A.check("objective history monotone", r.monotone, r.monotone ? 1.0 : 0.0, 1.0, "==");
    A.header = {"iteration", "objective"};
    for (std::size_t i = 0; i < r.history.size(); ++i) A.row({std::to_string(i), fmt(r.history[i])});
}

// ---- cyclicity probe

inline void pipeline_probe(const Params& P, Artifacts& A) {
    const CoeffSeq f = io::coeffseq_from_json(P.object("f"), P.at("f"));
    const double p = P.num("p");
    const auto ds = P.has("ladder") ? P.int_list("ladder", {}) : doubling_ladder(P.integer("dmax"));
    auto prof = cyclicity_profile(f, p, ds);
    A.header = {"d", "value", "interval_lo", "interval_hi", "iterations", "upper_bound"};
    bool mono = true;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const auto& e = prof[i];
        if (i > 0) mono = mono && e.deficit.value <= prof[i - 1].deficit.value;
        A.row({std::to_string(e.d), fmt(e.deficit.value), fmt(e.deficit.interval.lo), fmt(e.deficit.interval.hi),
               std::to_string(e.deficit.iterations), b2s(e.deficit.upper_bound)});
    }
    A.file("multiplier.json", io::to_json(prof.back().deficit.multiplier));
    A.certs["best_value"] = fmt(prof.back().deficit.value);
    A.certs["best_d"] = prof.back().d;
    A.check("profile nonincreasing", mono, mono ? 1.0 : 0.0, 1.0, "==");
}

// ---- witness

inline double sampled_outside(const CoeffSeq& S, const ArcSet& K, int samples) {
    const ArcSet C = K.complement();
    double m = 0.0;
    for (int i = 0; i < samples; ++i) m = std::max(m, std::abs(eval(S.window, C.point_at_fraction((i + 0.5) / samples))));
    return m;
}

inline void pipeline_witness(const Params& P, Artifacts& A) {
    const ArcSet K = io::arcset_from_json(P.object("k"), P.at("k"));
    const json sj = P.object("s");
    const CoeffSeq S = io::coeffseq_from_json(sj, P.at("s"));
    const double p = P.num("p");
    double outside = 0.0;
    std::string outside_src;
    if (P.has("s_outside")) {
        outside = P.num("s_outside");
        outside_src = "params";
    } else if (sj.contains("max_outside")) {
        outside = io::parse_number(sj["max_outside"], P.at("s") + ".max_outside");
        outside_src = "artifact";
    } else {
        outside = sampled_outside(S, K, static_cast<int>(P.integer("outside_samples", 4096)));
        outside_src = "window partial sums";
    }
    auto rep = smooth_noncyclic_witness(K, S, outside, p, P.num("eps_smooth", 0.5), P.int_list("ladder", {0, 1, 2, 4, 8, 16, 32, 64}),
                                        P.integer("M", 1 << 16), P.num("min_gap", 1e-3), P.num("B", 1e3));
    A.file("f_witness.json", io::to_json(rep.witness.f.truncated(P.integer("artifact_window", 4096))));
    A.file("Z.json", io::to_json(rep.witness.Z));
    A.certs["S_outside"] = fmt(outside);
    A.certs["S_outside_source"] = outside_src;
    A.certs["order"] = rep.witness.order;
    A.certs["gaps"] = rep.witness.gaps.size();
    A.certs["tail_exp"] = fmt(rep.witness.f.tail_exp);
    A.header = {"d", "bound", "s0_lo", "s_norm_hi", "residual_numeric", "residual_truncation", "residual_used", "structural_zero"};
    double best = 0.0;
    for (const auto& o : rep.ladder) {
        best = std::max(best, o.bound);
        A.row({std::to_string(o.d), fmt(o.bound), fmt(o.s0.lo), fmt(o.s_norm.hi), fmt(o.residual_numeric), fmt(o.residual_truncation),
               fmt(o.residual_used), b2s(o.structural_zero)});
    }
    A.check("K inside Z", K.intersect(rep.witness.Z.complement()).measure() == 0.0, K.intersect(rep.witness.Z.complement()).measure(), 0.0,
            "==");
    A.check("obstruction bound > 0", best > 0.0, best, 0.0, ">");
}

// ---- corollary demo

inline double conjugate_exponent(const Params& P, double q) {
    const double p = q / (q - 1.0);
    if (P.has("p")) {
        const double given = P.num("p");
        if (std::fabs(given - p) > 1e-3)
            throw SchemaError(P.at("p"), "p must be the conjugate exponent q/(q-1) = " + fmt(p) + " (within 1e-3)");
    }
    return p;
}

inline void pipeline_demo(const Params& P, Artifacts& A) {
    const double q = P.num("q", 4.0);
    conjugate_exponent(P, q);
    auto h = run_stages(helson_config(P));
    helson_artifacts(h, A, P);
    DemoConfig dc;
    dc.eps_smooth = P.num("eps_smooth", dc.eps_smooth);
    dc.min_gap = P.num("min_gap", dc.min_gap);
    dc.witness_M = P.integer("witness_M", dc.witness_M);
    dc.sample_arcs = static_cast<int>(P.integer("sample_arcs", dc.sample_arcs));
    dc.ext_degree = P.integer("ext_degree", dc.ext_degree);
    dc.ext_eps = P.num("ext_eps", dc.ext_eps);
    dc.ladder = P.int_list("ladder", dc.ladder);
    dc.zero_checks = static_cast<int>(P.integer("zero_checks", dc.zero_checks));
    dc.B = P.num("B", dc.B);
    auto d = demo_corollary(h, q, dc);
    const auto win = P.integer("artifact_window", 4096);
    json fj = io::to_json(d.witness.f.truncated(win));
    fj["obstruction_bound"] = fmt(d.obstruction.bound);
    A.file("f_noncyclic.json", fj);
    json gj = io::to_json(d.g);
    json prof = json::array();
    for (const auto& e : d.profile) prof.push_back({{"d", e.d}, {"deficit", fmt(e.deficit.value)}});
    gj["deficit_profile"] = prof;
    A.file("g_cyclic.json", gj);
    json sp = json::array();
    for (double t : d.samples) sp.push_back(fmt(t));
    A.file("zero_set.json", {{"schema_version", io::kSchemaVersion},
                             {"K", io::to_json(h.K)},
                             {"Z", io::to_json(d.witness.Z)},
                             {"K_in_Z", d.K_in_Z},
                             {"sample_points", sp},
                             {"max_f_on_K", fmt(d.max_f_on_K)},
                             {"max_g_on_samples", fmt(d.max_g_on_samples)},
                             {"g_off_K_lower_bound", fmt(d.g_off_K.lower_bound)},
                             {"g_zeros_in_K", d.g_zeros_in_K}});
    A.certs["demo"] = {{"p", fmt(d.p)},
                       {"q", fmt(d.q)},
                       {"witness_order", d.witness.order},
                       {"witness_tail_exp", fmt(d.witness.f.tail_exp)},
                       {"obstruction_bound", fmt(d.obstruction.bound)},
                       {"s0", io::interval_json(d.obstruction.s0)},
                       {"s_norm", io::interval_json(d.obstruction.s_norm)},
                       {"structural_zero", d.obstruction.structural_zero},
                       {"extension_a_norm", fmt(d.extension.a_norm)},
                       {"extension_ap_norm", fmt(d.extension.ap_norm)},
                       {"best_deficit", fmt(d.best_deficit)},
                       {"best_d", d.best_d}};
    A.check("obstruction bound > 0 for the smooth witness", d.obstruction.bound > 0.0, d.obstruction.bound, 0.0, ">");
    A.check("min_{d<=64} deficit(g) < 0.5", d.best_deficit < 0.5, d.best_deficit, 0.5, "<");
    A.check("|f| < 1e-9 on K", d.max_f_on_K < 1e-9, d.max_f_on_K, 1e-9, "<");
    A.check("|g| < 1e-9 at the sample points of K", d.max_g_on_samples < 1e-9, d.max_g_on_samples, 1e-9, "<");
    A.check("K inside Z", d.K_in_Z, d.K_in_Z ? 1.0 : 0.0, 1.0, "==");
    A.check("zeros of g inside K (certified |g| > 0 off K)", d.g_zeros_in_K, d.g_off_K.lower_bound, 0.0, ">");
    A.header = {"d", "deficit", "interval_hi"};
    A.rows.clear();
    for (const auto& e : d.profile) A.row({std::to_string(e.d), fmt(e.deficit.value), fmt(e.deficit.interval.hi)});
}

// ---- dispatch

using Pipeline = std::function<void(const Params&, Artifacts&)>;

inline const std::map<std::string, Pipeline>& pipelines() {
    static const std::map<std::string, Pipeline> m{
        {"phi", pipeline_phi},           {"kahane", pipeline_kahane},     {"bernstein", pipeline_bernstein},
        {"riesz", pipeline_riesz},       {"principal", pipeline_principal}, {"helson", pipeline_helson},
        {"extension", pipeline_extension}, {"probe", pipeline_probe},     {"witness", pipeline_witness},
        {"demo-corollary", pipeline_demo}};
    return m;
}

inline std::string csv_text(const Artifacts& A) {
    std::string s;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
        s += "\n";
    };
    line(A.header);
    for (const auto& r : A.rows) line(r);
    return s;
}

// Runs a pipeline and writes its artifacts; returns the list of failed certificates.
inline std::vector<std::string> execute(const std::string& name, const json& params, const std::string& out_dir,
                                        const std::filesystem::path& base = {}) {
    auto it = pipelines().find(name);
    if (it == pipelines().end()) throw SchemaError("$.pipeline", "unknown pipeline '" + name + "'");
    Params P(params, "$.params", base);
    Artifacts A;
    const auto t0 = std::chrono::steady_clock::now();
    it->second(P, A);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ResourceError("cannot create output directory '" + out_dir + "': " + ec.message(), "output");
    const std::filesystem::path dir(out_dir);
    for (const auto& [file, j] : A.files) io::write_json((dir / file).string(), j);
    json cert = {{"schema_version", io::kSchemaVersion},
                 {"pipeline", name},
                 {"seed", std::to_string(master_seed())},
                 {"params", params},
                 {"all_pass", A.failed.empty()},
                 {"checks", A.checks}};
    for (auto& [k, v] : A.certs.items()) cert[k] = v;
    io::write_json((dir / "certificates.json").string(), cert);
    io::write_text((dir / "report.csv").string(), csv_text(A));
    std::cerr << name << ": " << A.checks.size() << " checks, " << A.failed.size() << " failed, " << secs << " s, artifacts in "
              << out_dir << "\n";
    return A.failed;
}

}  // namespace wiener::cli
