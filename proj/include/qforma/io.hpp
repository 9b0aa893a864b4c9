#ifndef QFORMA_IO_HPP
#define QFORMA_IO_HPP

// Text grammars and JSON serialization for the command-line layer.
//
// Grammars (whitespace ignored, names case-sensitive):
//   field    := "QQ" | "GF(p)"  followed by "((v))" tower layers
//               or by one "(X1,...,Xn)" rational-function suffix
//   element  := ['+'|'-'] term (('+'|'-') term)* with term := factor (('*'|'/') factor)*
//               and factor := (integer | variable | '(' element ')') ['^' ['-'] integer]
//   form     := "<e1,...,en>" | "pf<<a1,...,an>>" | bare "e1,...,en"
//   poly     := element grammar; identifiers that are not field variables
//               become ring variables, ordered lexicographically
//   vector   := "[e1,...,en]" | bare "e1,...,en"
//   word     := "[v...]*[v...]*..." product of vectors in the even Clifford algebra
//
// Parse failures throw ParseError carrying the byte offset into the original
// string. Serialization is deterministic: object keys are sorted and reports
// carry no wall-clock data, so identical inputs produce byte-identical JSON.
// Certificates embed their field and variable list and re-verify after a
// round trip through certificate_from_json.

#include "qforma/cliffspin.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qforma {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
    enum Kind { Int, Ident, Punct, End } kind = End;
    std::string text;
    size_t pos = 0;
};

inline bool lex_ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

inline bool lex_ident_char(char c) { return lex_ident_start(c) || (c >= '0' && c <= '9'); }

inline std::vector<Token> lex(const std::string& src) {
    static const std::string puncts = "()<>[],*/^+-";
    std::vector<Token> out;
    size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        if (c >= '0' && c <= '9') {
            size_t j = i;
            while (j < src.size() && src[j] >= '0' && src[j] <= '9') ++j;
            out.push_back({Token::Int, src.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (lex_ident_start(c)) {
            size_t j = i;
            while (j < src.size() && lex_ident_char(src[j])) ++j;
            out.push_back({Token::Ident, src.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (puncts.find(c) != std::string::npos) {
            out.push_back({Token::Punct, std::string(1, c), i});
            ++i;
            continue;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", i);
    }
    out.push_back({Token::End, "", src.size()});
    return out;
}

struct Cursor {
    std::vector<Token> toks;
    size_t i = 0;

    const Token& peek(size_t ahead = 0) const {
        size_t j = i + ahead;
        return j < toks.size() ? toks[j] : toks.back();
    }
    Token eat() { return toks[i < toks.size() - 1 ? i++ : i]; }
    bool at_punct(const char* p, size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Token::Punct && t.text == p;
    }
    bool eat_punct(const char* p) {
        if (!at_punct(p)) return false;
        eat();
        return true;
    }
    void expect_punct(const char* p, const char* what) {
        if (!eat_punct(p))
            throw ParseError(std::string("expected '") + p + "' " + what, peek().pos);
    }
    void expect_end() {
        if (peek().kind != Token::End)
            throw ParseError("unexpected trailing input '" + peek().text + "'", peek().pos);
    }
};

// ---------------------------------------------------------------------------
// Variable resolution
// ---------------------------------------------------------------------------

// Element of `f` named by a tower or function-field variable, searching the
// base fields recursively; nullopt for unknown names.
inline std::optional<FieldElem> field_variable(const FieldPtr& f, const std::string& name) {
    if (f->kind == FieldKind::LaurentTower) {
        for (size_t k = 0; k < f->vars.size(); ++k)
            if (f->vars[k] == name) {
                Exps e(f->vars.size(), 0);
                e[k] = 1;
                return tower_monomial(f, e, fe_one(f->base));
            }
        if (auto inner = field_variable(f->base, name)) return tower_embed(f, *inner);
        return std::nullopt;
    }
    if (f->kind == FieldKind::RationalFunctions) {
        for (const std::string& v : f->vars)
            if (v == name) return fe_from_poly(f, poly_var(f->base, f->vars, name));
        if (auto inner = field_variable(f->base, name))
            return fe_from_poly(f, poly_const(f->base, f->vars, *inner));
        return std::nullopt;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Expression parser, shared between field elements and polynomials
// ---------------------------------------------------------------------------

// Value operations for the expression grammar. Exponents are capped to keep
// accidental giant powers from running away.
constexpr long expr_exp_cap = 512;

struct ElemOps {
    using Value = FieldElem;
    FieldPtr field;

    Value from_int(const std::string& digits, size_t) const {
        FieldElem ten = fe_from_int(field, 10);
        FieldElem acc = fe_zero(field);
        for (char c : digits) acc = fe_add(fe_mul(acc, ten), fe_from_int(field, c - '0'));
        return acc;
    }
    Value var(const std::string& name, size_t pos) const {
        if (auto v = field_variable(field, name)) return *v;
        throw ParseError("unknown variable '" + name + "'", pos);
    }
    Value add(const Value& a, const Value& b) const { return fe_add(a, b); }
    Value sub(const Value& a, const Value& b) const { return fe_sub(a, b); }
    Value neg(const Value& a) const { return fe_neg(a); }
    Value mul(const Value& a, const Value& b) const { return fe_mul(a, b); }
    Value div(const Value& a, const Value& b, size_t pos) const {
        if (fe_is_zero(b)) throw ParseError("division by zero", pos);
        return fe_div(a, b);
    }
    Value pow(const Value& a, long e, size_t pos) const {
        FieldElem base = a;
        if (e < 0) {
            if (fe_is_zero(a)) throw ParseError("zero to a negative power", pos);
            base = fe_inv(a);
            e = -e;
        }
        FieldElem acc = fe_one(field);
        for (long k = 0; k < e; ++k) acc = fe_mul(acc, base);
        return acc;
    }
};

struct PolyOps {
    using Value = Poly;
    FieldPtr field;                  // coefficient field
    std::vector<std::string> vars;   // ring variables, fixed up front

    Value from_int(const std::string& digits, size_t pos) const {
        return poly_const(field, vars, ElemOps{field}.from_int(digits, pos));
    }
    Value var(const std::string& name, size_t pos) const {
        for (const std::string& v : vars)
            if (v == name) return poly_var(field, vars, name);
        if (auto c = field_variable(field, name)) return poly_const(field, vars, *c);
        throw ParseError("unknown variable '" + name + "'", pos);
    }
    Value add(const Value& a, const Value& b) const { return poly_add(a, b); }
    Value sub(const Value& a, const Value& b) const { return poly_sub(a, b); }
    Value neg(const Value& a) const { return poly_neg(a); }
    Value mul(const Value& a, const Value& b) const { return poly_mul(a, b); }
    Value div(const Value& a, const Value& b, size_t pos) const {
        if (poly_is_zero(b)) throw ParseError("division by zero", pos);
        if (poly_total_deg(b) != 0)
            throw ParseError("division by a nonconstant polynomial", pos);
        return poly_scale(fe_inv(b.terms.begin()->second), a);
    }
    Value pow(const Value& a, long e, size_t pos) const {
        if (e < 0) throw ParseError("negative exponent in a polynomial", pos);
        return poly_pow(a, static_cast<unsigned>(e));
    }
};

template <class Ops>
typename Ops::Value parse_expr(Cursor& cur, const Ops& ops);

template <class Ops>
typename Ops::Value parse_factor(Cursor& cur, const Ops& ops) {
    const Token& t = cur.peek();
    typename Ops::Value v = [&] {
        if (t.kind == Token::Int) return ops.from_int(cur.eat().text, t.pos);
        if (t.kind == Token::Ident) return ops.var(cur.eat().text, t.pos);
        if (cur.eat_punct("(")) {
            auto inner = parse_expr(cur, ops);
            cur.expect_punct(")", "to close the parenthesized expression");
            return inner;
        }
        throw ParseError("expected a number, variable, or '('", t.pos);
    }();
    if (cur.eat_punct("^")) {
        bool negexp = cur.eat_punct("-");
        const Token& e = cur.peek();
        if (e.kind != Token::Int) throw ParseError("expected an integer exponent", e.pos);
        if (e.text.size() > 4 || std::stol(e.text) > expr_exp_cap)
            throw ParseError("exponent too large", e.pos);
        long exp = std::stol(cur.eat().text);
        v = ops.pow(v, negexp ? -exp : exp, e.pos);
    }
    return v;
}

template <class Ops>
typename Ops::Value parse_term(Cursor& cur, const Ops& ops) {
    auto v = parse_factor(cur, ops);
    while (cur.at_punct("*") || cur.at_punct("/")) {
        bool divide = cur.peek().text == "/";
        size_t pos = cur.eat().pos;
        auto rhs = parse_factor(cur, ops);
        v = divide ? ops.div(v, rhs, pos) : ops.mul(v, rhs);
    }
    return v;
}

template <class Ops>
typename Ops::Value parse_expr(Cursor& cur, const Ops& ops) {
    bool lead_neg = false;
    if (cur.at_punct("+") || cur.at_punct("-")) lead_neg = cur.eat().text == "-";
    auto v = parse_term(cur, ops);
    if (lead_neg) v = ops.neg(v);
    while (cur.at_punct("+") || cur.at_punct("-")) {
        bool subtract = cur.eat().text == "-";
        auto rhs = parse_term(cur, ops);
        v = subtract ? ops.sub(v, rhs) : ops.add(v, rhs);
    }
    return v;
}

inline bool small_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Public parsers
// ---------------------------------------------------------------------------

inline FieldPtr parse_field(const std::string& src) {
    detail::Cursor cur{detail::lex(src)};
    const detail::Token& head = cur.peek();
    if (head.kind != detail::Token::Ident)
        throw ParseError("expected a field name ('QQ' or 'GF')", head.pos);
    FieldPtr base;
    if (head.text == "QQ") {
        cur.eat();
        base = make_rationals();
    } else if (head.text == "GF") {
        cur.eat();
        cur.expect_punct("(", "after 'GF'");
        const detail::Token& pt = cur.peek();
        if (pt.kind != detail::Token::Int) throw ParseError("expected a prime", pt.pos);
        if (pt.text.size() > 9) throw ParseError("prime too large", pt.pos);
        long p = std::stol(cur.eat().text);
        if (p == 2) throw ParseError("characteristic 2 is not supported", pt.pos);
        if (!detail::small_prime(p))
            throw ParseError("'" + pt.text + "' is not prime", pt.pos);
        cur.expect_punct(")", "to close 'GF('");
        base = make_prime_field(p);
    } else {
        throw ParseError("unknown field '" + head.text + "' (use 'QQ' or 'GF(p)')", head.pos);
    }

    auto read_var = [&cur]() {
        const detail::Token& v = cur.peek();
        if (v.kind != detail::Token::Ident)
            throw ParseError("expected a variable name", v.pos);
        return cur.eat().text;
    };

    std::vector<std::string> tower_vars;
    std::set<std::string> seen;
    while (cur.at_punct("(") && cur.at_punct("(", 1)) {
        size_t pos = cur.peek().pos;
        cur.eat();
        cur.eat();
        std::string v = read_var();
        if (!seen.insert(v).second) throw ParseError("duplicate variable '" + v + "'", pos);
        cur.expect_punct(")", "to close the Laurent layer");
        cur.expect_punct(")", "to close the Laurent layer");
        tower_vars.push_back(std::move(v));
    }
    if (!tower_vars.empty()) base = make_laurent_tower(base, std::move(tower_vars));

    if (cur.eat_punct("(")) {
        std::vector<std::string> fvars;
        do {
            size_t pos = cur.peek().pos;
            std::string v = read_var();
            if (!seen.insert(v).second)
                throw ParseError("duplicate variable '" + v + "'", pos);
            fvars.push_back(std::move(v));
        } while (cur.eat_punct(","));
        cur.expect_punct(")", "to close the variable list");
        base = make_rational_functions(base, std::move(fvars));
    }
    cur.expect_end();
    return base;
}

inline FieldElem parse_element(const FieldPtr& field, const std::string& src) {
    detail::Cursor cur{detail::lex(src)};
    FieldElem v = detail::parse_expr(cur, detail::ElemOps{field});
    cur.expect_end();
    return v;
}

inline Vec parse_vector(const FieldPtr& field, const std::string& src) {
    detail::Cursor cur{detail::lex(src)};
    bool bracketed = cur.eat_punct("[");
    Vec out;
    detail::ElemOps ops{field};
    do {
        out.push_back(detail::parse_expr(cur, ops));
    } while (cur.eat_punct(","));
    if (bracketed) cur.expect_punct("]", "to close the vector");
    cur.expect_end();
    return out;
}

inline QuadForm parse_form(const FieldPtr& field, const std::string& src) {
    detail::Cursor cur{detail::lex(src)};
    detail::ElemOps ops{field};
    auto parse_list = [&](const char* closer, const char* what) {
        std::vector<FieldElem> cs;
        do {
            cs.push_back(detail::parse_expr(cur, ops));
        } while (cur.eat_punct(","));
        cur.expect_punct(closer, what);
        return cs;
    };
    if (cur.peek().kind == detail::Token::Ident && cur.peek().text == "pf" &&
        cur.at_punct("<", 1)) {
        cur.eat();
        cur.expect_punct("<", "after 'pf'");
        cur.expect_punct("<", "after 'pf<'");
        std::vector<FieldElem> slots = parse_list(">", "to close the Pfister slots");
        cur.expect_punct(">", "to close the Pfister slots");
        cur.expect_end();
        return pfister_form(field, slots);
    }
    std::vector<FieldElem> cs;
    if (cur.eat_punct("<")) {
        cs = parse_list(">", "to close the form");
    } else {
        do {
            cs.push_back(detail::parse_expr(cur, ops));
        } while (cur.eat_punct(","));
    }
    cur.expect_end();
    return make_form(field, std::move(cs));
}

// Ring variables: supplied explicitly, or inferred as the identifiers that do
// not name field variables, ordered lexicographically.
inline Poly parse_poly(const FieldPtr& field, const std::string& src,
                       std::vector<std::string> vars = {}) {
    std::vector<detail::Token> toks = detail::lex(src);
    if (vars.empty()) {
        std::set<std::string> names;
        for (const detail::Token& t : toks)
            if (t.kind == detail::Token::Ident && !detail::field_variable(field, t.text))
                names.insert(t.text);
        vars.assign(names.begin(), names.end());
    }
    if (vars.empty()) vars.push_back("T");   // a constant still needs a ring
    detail::Cursor cur{std::move(toks)};
    Poly v = detail::parse_expr(cur, detail::PolyOps{field, std::move(vars)});
    cur.expect_end();
    return v;
}

// Product of vectors in the even Clifford algebra of `form`.
inline CliffordElem parse_clifford_word(const QuadForm& form, const std::string& src) {
    detail::Cursor cur{detail::lex(src)};
    detail::ElemOps ops{form.field};
    CliffordElem acc = cliff_scalar(form, fe_one(form.field));
    size_t count = 0;
    do {
        cur.expect_punct("[", "to open a vector factor");
        Vec v;
        do {
            v.push_back(detail::parse_expr(cur, ops));
        } while (cur.eat_punct(","));
        cur.expect_punct("]", "to close the vector factor");
        if (v.size() != form_dim(form))
            throw ParseError("vector length " + std::to_string(v.size()) +
                                 " does not match the form dimension " +
                                 std::to_string(form_dim(form)),
                             cur.peek().pos);
        acc = cliff_mul(acc, cliff_vector(form, v));
        ++count;
    } while (cur.eat_punct("*"));
    cur.expect_end();
    if (count == 0) throw ParseError("empty Clifford word", 0);
    return acc;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string field_to_string(const FieldPtr& f) {
    switch (f->kind) {
        case FieldKind::Rationals: return "QQ";
        case FieldKind::PrimeField: return "GF(" + std::to_string(f->p) + ")";
        case FieldKind::LaurentTower: {
            std::string s = field_to_string(f->base);
            for (const std::string& v : f->vars) s += "((" + v + "))";
            return s;
        }
        case FieldKind::RationalFunctions: {
            std::string s = field_to_string(f->base) + "(";
            for (size_t i = 0; i < f->vars.size(); ++i) s += (i ? "," : "") + f->vars[i];
            return s + ")";
        }
    }
    throw Error("unreachable");
}

inline Json json_vec(const Vec& v) {
    Json a = Json::array();
    for (const FieldElem& x : v) a.push_back(fe_to_string(x));
    return a;
}

inline Json json_form(const QuadForm& f) {
    Json a = Json::array();
    for (const FieldElem& c : f.coeffs) a.push_back(fe_to_string(c));
    return a;
}

inline Json json_class_set(const ClassSet& s) {
    Json j;
    j["finite"] = s.finite;
    j["provenance"] = s.provenance;
    if (s.finite) {
        Json a = Json::array();
        for (const SquareClass& c : s.classes) a.push_back(fe_to_string(c.rep));
        j["classes"] = a;
    }
    return j;
}

// Stable content fingerprint for a certificate: FNV-1a over the canonical
// field/form/target/factor serialization.
inline std::string certificate_hash(const ProductCertificate& cert) {
    std::string s = field_to_string(cert.form.field) + "|" + form_to_string(cert.form) + "|" +
                    poly_to_string(cert.target) + "|" + std::to_string(cert.bound);
    for (const ProductFactor& f : cert.factors) {
        s += "|" + poly_to_string(f.value_num) + "/" + poly_to_string(f.value_den) + "|[";
        for (size_t i = 0; i < f.vec_nums.size(); ++i)
            s += (i ? "," : "") + poly_to_string(f.vec_nums[i]);
        s += "]/" + poly_to_string(f.vec_den);
    }
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a:") + buf;
}

inline Json json_certificate(const ProductCertificate& cert) {
    Json j;
    j["field"] = field_to_string(cert.form.field);
    j["form"] = json_form(cert.form);
    j["vars"] = cert.target.vars;
    j["target"] = poly_to_string(cert.target);
    j["bound"] = cert.bound;
    Json fs = Json::array();
    for (const ProductFactor& f : cert.factors) {
        Json jf;
        jf["value_num"] = poly_to_string(f.value_num);
        jf["value_den"] = poly_to_string(f.value_den);
        Json nums = Json::array();
        for (const Poly& q : f.vec_nums) nums.push_back(poly_to_string(q));
        jf["vec_nums"] = nums;
        jf["vec_den"] = poly_to_string(f.vec_den);
        fs.push_back(std::move(jf));
    }
    j["factors"] = fs;
    j["hash"] = certificate_hash(cert);
    return j;
}

// Rebuild a certificate from its JSON image. The hash is re-derived and
// compared; verification proper is the caller's job.
inline ProductCertificate certificate_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("field") || !j.contains("form") || !j.contains("target") ||
        !j.contains("vars") || !j.contains("factors"))
        throw BadCertificate("certificate JSON is missing required fields");
    FieldPtr field = parse_field(j.at("field").get<std::string>());
    std::vector<FieldElem> cs;
    for (const Json& c : j.at("form")) cs.push_back(parse_element(field, c.get<std::string>()));
    std::vector<std::string> vars = j.at("vars").get<std::vector<std::string>>();
    ProductCertificate cert;
    cert.form = make_form(field, std::move(cs));
    cert.target = parse_poly(field, j.at("target").get<std::string>(), vars);
    cert.bound = j.value("bound", size_t{0});
    for (const Json& jf : j.at("factors")) {
        ProductFactor f{parse_poly(field, jf.at("value_num").get<std::string>(), vars),
                        parse_poly(field, jf.at("value_den").get<std::string>(), vars),
                        {},
                        parse_poly(field, jf.at("vec_den").get<std::string>(), vars)};
        for (const Json& q : jf.at("vec_nums"))
            f.vec_nums.push_back(parse_poly(field, q.get<std::string>(), vars));
        cert.factors.push_back(std::move(f));
    }
    if (j.contains("hash") && j.at("hash").get<std::string>() != certificate_hash(cert))
        throw BadCertificate("certificate hash does not match its content");
    return cert;
}

inline Json json_verdict(const Verdict& v) {
    Json j;
    j["status"] = truth_name(v.status);
    j["rule"] = v.reason;
    if (v.scale) j["scale"] = fe_to_string(*v.scale);
    if (v.witness) j["witness"] = json_vec(*v.witness);
    if (v.product) j["certificate"] = json_certificate(*v.product);
    if (v.refutation) {
        Json r;
        r["probe"] = v.refutation->probe.label;
        r["condition"] = v.refutation->condition;
        r["witness"] = fe_to_string(v.refutation->witness);
        j["refutation"] = r;
    }
    if (v.norm_table) {
        Json t = Json::array();
        for (const auto& [l, r] : *v.norm_table)
            t.push_back(Json::array({fe_to_string(l), fe_to_string(r)}));
        j["norm_table"] = t;
    }
    return j;
}

inline Json json_iso(const IsoResult& r) {
    Json j;
    j["status"] = r.status == Truth::Proven     ? "Isotropic"
                  : r.status == Truth::Refuted  ? "Anisotropic"
                                                : "Unknown";
    if (r.witness) j["witness"] = json_vec(*r.witness);
    return j;
}

inline Json json_witt(const WittDecomposition& w) {
    Json j;
    j["decided"] = w.decided;
    if (w.decided) {
        j["index"] = w.index;
        j["kernel"] = json_form(w.kernel);
    }
    return j;
}

} // namespace qforma

#endif
