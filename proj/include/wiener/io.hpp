#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "cyclicity.hpp"
#include "kahane.hpp"
#include "rudin_shapiro.hpp"

namespace wiener::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Decimal string, "p/q" rational, or a JSON number.
inline double parse_number(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw SchemaError(path, "expected a number");
    const auto s = v.get<std::string>();
    if (s.find('/') != std::string::npos) {
        try {
            return to_double(parse_rational(s));
        } catch (const std::exception&) {
            throw SchemaError(path, "malformed rational '" + s + "'");
        }
    }
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw SchemaError(path, "malformed number '" + s + "'");
    }
    if (pos != s.size()) throw SchemaError(path, "malformed number '" + s + "'");
    return x;
}

inline const json& field(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(path + "." + key, "missing field");
    return j.at(key);
}

inline std::int64_t parse_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<std::int64_t>();
}

inline void check_version(const json& j, const std::string& path) {
    if (j.is_object() && j.contains("schema_version") && j["schema_version"] != kSchemaVersion)
        throw SchemaError(path + ".schema_version", "unsupported schema_version");
}

// ---- polynomials and coefficient sequences

inline json coeffs_json(const Poly& f) {
    json arr = json::array();
    for (std::int64_t n = -f.degree(); n <= f.degree(); ++n) {
        const Complex c = f[n];
        if (c == Complex{}) continue;
        arr.push_back({{"n", n}, {"re", fmt(c.real())}, {"im", fmt(c.imag())}});
    }
    return arr;
}

inline json to_json(const Poly& f) {
    return {{"schema_version", kSchemaVersion}, {"degree", f.degree()}, {"coeffs", coeffs_json(f)}};
}

inline json to_json(const QPoly& f) {
    json arr = json::array();
    for (std::int64_t n = -f.degree(); n <= f.degree(); ++n) {
        const auto& c = f[n];
        if (c.is_zero()) continue;
        arr.push_back({{"n", n}, {"re", rational_to_string(c.re)}, {"im", rational_to_string(c.im)}});
    }
    return {{"schema_version", kSchemaVersion}, {"degree", f.degree()}, {"coeffs", arr}};
}

inline json to_json(const CoeffSeq& x) {
    json j = to_json(x.window);
    j["tail"] = {{"M", x.M()}, {"const", fmt(x.tail_const)}, {"exp", fmt(x.tail_exp)}, {"window_err", fmt(x.window_err)}};
    return j;
}

inline Poly poly_from_json(const json& j, const std::string& path = "$") {
    check_version(j, path);
    const auto d = parse_int(field(j, "degree", path), path + ".degree");
    if (d < 0) throw SchemaError(path + ".degree", "degree must be nonnegative");
    check_coeff_budget(2 * d + 1, "poly_from_json");
    Poly f(d);
    const auto& cs = field(j, "coeffs", path);
    if (!cs.is_array()) throw SchemaError(path + ".coeffs", "expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string p = path + ".coeffs[" + std::to_string(i) + "]";
        const auto n = parse_int(field(cs[i], "n", p), p + ".n");
        if (n < -d || n > d) throw SchemaError(p + ".n", "frequency outside the degree");
        const double re = parse_number(field(cs[i], "re", p), p + ".re");
        const double im = cs[i].contains("im") ? parse_number(cs[i]["im"], p + ".im") : 0.0;
        f.set(n, Complex(re, im));
    }
    return f;
}

inline CoeffSeq coeffseq_from_json(const json& j, const std::string& path = "$") {
    Poly w = poly_from_json(j, path);
    if (!j.contains("tail")) return CoeffSeq(std::move(w));
    const auto& t = j["tail"];
    const double C = t.contains("const") ? parse_number(t["const"], path + ".tail.const") : 0.0;
    const double e = t.contains("exp") ? parse_number(t["exp"], path + ".tail.exp") : 0.0;
    const double err = t.contains("window_err") ? parse_number(t["window_err"], path + ".tail.window_err") : 0.0;
    if (C < 0 || e < 0 || err < 0) throw SchemaError(path + ".tail", "tail bounds must be nonnegative");
    if (t.contains("M") && parse_int(t["M"], path + ".tail.M") != w.degree())
        throw SchemaError(path + ".tail.M", "tail.M must equal the window degree");
    return CoeffSeq(std::move(w), C, e, err);
}

// ---- arc sets

inline json to_json(const ArcSet& K) {
    json arr = json::array();
    for (const auto& a : K.pieces()) arr.push_back({fmt(a.a), fmt(a.b)});
    return {{"schema_version", kSchemaVersion}, {"measure", fmt(K.measure())}, {"pieces", arr}};
}

inline ArcSet arcset_from_json(const json& j, const std::string& path = "$") {
    check_version(j, path);
    const auto& ps = field(j, "pieces", path);
    if (!ps.is_array()) throw SchemaError(path + ".pieces", "expected an array");
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string p = path + ".pieces[" + std::to_string(i) + "]";
        if (!ps[i].is_array() || ps[i].size() != 2) throw SchemaError(p, "expected [a, b]");
        const double a = parse_number(ps[i][0], p + "[0]"), b = parse_number(ps[i][1], p + "[1]");
        if (!(b >= a)) throw SchemaError(p, "arc needs a <= b");
        arcs.push_back({a, b});
    }
    return ArcSet::from_arcs(arcs);
}

inline json interval_json(const Interval& x) { return {{"lo", fmt(x.lo)}, {"hi", fmt(x.hi)}}; }

// ---- files

inline json read_json(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw SchemaError("$", "cannot open file '" + file + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
}

inline void write_text(const std::string& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ResourceError("cannot write '" + file + "'", "output");
    out << text;
}

inline void write_json(const std::string& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

}  // namespace wiener::io
