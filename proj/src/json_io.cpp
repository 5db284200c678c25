#include "melkit/json_io.hpp"

#include <fstream>

namespace melkit {

namespace {

struct SchemaError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

const Json& require(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw SchemaError(std::string("missing field '") + key + "'");
    return *it;
}

} // namespace

Json to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const Json& j) {
    if (j.is_string()) return Rational::from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw SchemaError("rational values must be \"p/q\" strings or integers");
}

Json to_json(const PolyH& p) {
    Json arr = Json::array();
    for (const auto& c : p.coeffs()) arr.push_back(c.str());
    return arr;
}

PolyH poly_from_json(const Json& j) {
    if (!j.is_array()) throw SchemaError("polynomial must be a coefficient array");
    std::vector<Rational> cs;
    cs.reserve(j.size());
    for (const auto& c : j) cs.push_back(rational_from_json(c));
    return PolyH(std::move(cs));
}

Json to_json(const AlgebraicTail& t) {
    Json arr = Json::array();
    for (const auto& [m, c] : t.terms())
        arr.push_back(Json{{"m", m}, {"coeffs", to_json(c)}});
    return arr;
}

AlgebraicTail tail_from_json(const Json& j) {
    if (!j.is_array()) throw SchemaError("tail must be an array of {m, coeffs}");
    AlgebraicTail t;
    for (const auto& e : j)
        t.add_term(require(e, "m").get<int>(), poly_from_json(require(e, "coeffs")));
    return t;
}

Json to_json(const ReducedExpr& e) {
    Json basis = Json::array();
    for (const auto& [g, c] : e.basis())
        basis.push_back(Json{{"gen", std::string(gen_name(g))}, {"coeffs", to_json(c)}});
    return Json{{"denom_power", e.denom_power()}, {"basis", basis}, {"tail", to_json(e.tail())}};
}

ReducedExpr reduced_expr_from_json(const Json& j) {
    ReducedExpr e;
    for (const auto& b : require(j, "basis")) {
        const Gen g = gen_from_name(require(b, "gen").get<std::string>());
        const PolyH c = poly_from_json(require(b, "coeffs"));
        e += ReducedExpr::generator(g).multiplied(c);
    }
    AlgebraicTail t = tail_from_json(require(j, "tail"));
    e += ReducedExpr::from_tail(std::move(t));
    const int p = require(j, "denom_power").get<int>();
    if (p < 0) throw SchemaError("denom_power must be >= 0");
    e.attach_denominator(p);
    return e;
}

Json to_json(const PerturbationSpec& s) {
    Json f = Json::object(), g = Json::object();
    for (int piece = 1; piece <= 4; ++piece) {
        Json fa = Json::array(), ga = Json::array();
        for (int i = 0; i <= s.degree(); ++i) {
            for (int j = 0; i + j <= s.degree(); ++j) {
                if (!s.a(piece, i, j).is_zero())
                    fa.push_back(Json::array({i, j, s.a(piece, i, j).str()}));
                if (!s.b(piece, i, j).is_zero())
                    ga.push_back(Json::array({i, j, s.b(piece, i, j).str()}));
            }
        }
        f[std::to_string(piece)] = fa;
        g[std::to_string(piece)] = ga;
    }
    return Json{{"eta", s.eta().str()},
                {"n", s.degree()},
                {"case", case_name(s.kind())},
                {"f", f},
                {"g", g}};
}

PerturbationSpec spec_from_json(const Json& j) {
    const Rational eta = rational_from_json(require(j, "eta"));
    const int n = require(j, "n").get<int>();
    const PerturbationCase kind = case_from_name(require(j, "case").get<std::string>());
    PerturbationSpec spec(eta, n, kind);

    auto load = [&](const char* key, bool is_f) {
        auto it = j.find(key);
        if (it == j.end()) return;
        if (!it->is_object()) throw SchemaError(std::string(key) + " must map piece -> entries");
        for (const auto& [piece_key, entries] : it->items()) {
            const int piece = std::stoi(piece_key);
            for (const auto& e : entries) {
                if (!e.is_array() || e.size() != 3)
                    throw SchemaError("coefficient entries are [i, j, \"p/q\"]");
                const int i = e[0].get<int>();
                const int jj = e[1].get<int>();
                Rational v = rational_from_json(e[2]);
                if (is_f) spec.set_a(piece, i, jj, std::move(v));
                else spec.set_b(piece, i, jj, std::move(v));
            }
        }
    };
    load("f", true);
    load("g", false);
    spec.validate();
    return spec;
}

Json to_json(const GeneratorConstants& k) {
    return Json{{"eta", k.eta.str()},
                {"c1", k.c1},     {"c2", k.c2},
                {"d1", k.d1},     {"d2", k.d2},
                {"e1", k.e1},     {"e2", k.e2},
                {"c1_hat", k.c1_hat}, {"d1_hat", k.d1_hat},
                {"calibration_h", k.calibration_h},
                {"residual", k.residual}};
}

GeneratorConstants constants_from_json(const Json& j) {
    GeneratorConstants k;
    k.eta = rational_from_json(require(j, "eta"));
    k.c1 = require(j, "c1").get<double>();
    k.c2 = require(j, "c2").get<double>();
    k.d1 = require(j, "d1").get<double>();
    k.d2 = require(j, "d2").get<double>();
    k.e1 = require(j, "e1").get<double>();
    k.e2 = require(j, "e2").get<double>();
    k.c1_hat = require(j, "c1_hat").get<double>();
    k.d1_hat = require(j, "d1_hat").get<double>();
    k.calibration_h = require(j, "calibration_h").get<std::vector<double>>();
    k.residual = require(j, "residual").get<double>();
    return k;
}

Json to_json(const ZeroReport& r) {
    Json zeros = Json::array();
    for (const auto& z : r.zeros)
        zeros.push_back(Json{{"bracket_lo", z.lo}, {"bracket_hi", z.hi}, {"h", z.h}});
    return Json{{"zeros", zeros},
                {"count", r.count},
                {"bound", r.bound},
                {"within_bound", r.within_bound},
                {"scan", Json{{"samples", r.scan.samples},
                              {"refine_tol", r.scan.refine_tol},
                              {"endpoint_margin", r.scan.endpoint_margin}}}};
}

Json to_json(const StructureReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back(Json{{"name", c.name}, {"degree", c.degree},
                              {"bound", c.bound}, {"ok", c.ok}});
    return Json{{"n", r.n},
                {"case", case_name(r.kind)},
                {"denom_power", r.denom_power},
                {"expected_denom_power", r.expected_denom_power},
                {"checks", checks},
                {"ok", r.ok}};
}

Json to_json(const BasisCrossCheck& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back(Json{{"name", row.name}, {"value", row.value},
                            {"reference", row.reference},
                            {"abs_diff", row.abs_diff}, {"ok", row.ok}});
    return Json{{"h", r.h}, {"rows", rows}, {"all_consistent", r.all_consistent}};
}

Json to_json(const CycleReport& r) {
    Json cycles = Json::array();
    for (const auto& c : r.cycles) {
        Json jc{{"y", c.y}, {"h", c.h}, {"return_map_derivative", c.deriv}};
        if (c.matched_zero) {
            jc["matched_zero"] = *c.matched_zero;
            jc["dh"] = c.dh;
        }
        cycles.push_back(jc);
    }
    return Json{{"cycles", cycles},
                {"displacement_identically_zero", r.displacement_identically_zero}};
}

PerturbationSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open spec file '" + path + "'");
    Json j;
    in >> j;
    return spec_from_json(j);
}

} // namespace melkit
