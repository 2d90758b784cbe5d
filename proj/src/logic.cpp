#include "mmln/logic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace mmln {

namespace {

bool is_ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9') || c == '_';
}

bool is_ws(char c) { return c == ' ' || c == '\t'; }

// Cursor over one physical line (comment already stripped).
struct LineCursor {
    std::string_view s;
    size_t pos = 0;
    int line = 0;

    int col() const { return static_cast<int>(pos) + 1; }
    bool done() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line, col());
    }

    void skip_ws() {
        while (!done() && is_ws(peek())) ++pos;
    }

    std::string ident() {
        if (done() || !is_ident_start(peek()))
            fail("expected identifier");
        size_t begin = pos;
        while (!done() && is_ident_char(peek())) ++pos;
        return std::string(s.substr(begin, pos - begin));
    }

    void expect(char c, const char* what) {
        if (done() || peek() != c)
            fail(std::string("expected '") + c + "' " + what);
        ++pos;
    }

    double number() {
        size_t begin = pos;
        if (!done() && peek() == '+') ++pos;  // from_chars takes '-' but not '+'
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), value);
        if (ec != std::errc() || ptr == s.data() + pos) {
            pos = begin;
            fail("expected weight");
        }
        pos = static_cast<size_t>(ptr - s.data());
        return value;
    }
};

std::string describe_role(const std::string& query_name) {
    return "head predicate must be the query predicate '" + query_name + "'";
}

}  // namespace

Term Term::from_name(std::string n) {
    bool upper = !n.empty() && n[0] >= 'A' && n[0] <= 'Z';
    return {upper ? Kind::Constant : Kind::Variable, std::move(n)};
}

int Model::predicate_index(std::string_view name) const {
    for (size_t i = 0; i < schemas.size(); ++i)
        if (schemas[i].name == name) return static_cast<int>(i);
    return -1;
}

int Model::query_predicate() const {
    for (size_t i = 0; i < schemas.size(); ++i)
        if (schemas[i].role == PredicateRole::Query) return static_cast<int>(i);
    return -1;
}

std::string_view to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::BadPredicateName: return "BadPredicateName";
        case ViolationCode::BadArity: return "BadArity";
        case ViolationCode::DuplicatePredicate: return "DuplicatePredicate";
        case ViolationCode::NoQueryPredicate: return "NoQueryPredicate";
        case ViolationCode::MultipleQueryPredicates: return "MultipleQueryPredicates";
        case ViolationCode::UndeclaredPredicate: return "UndeclaredPredicate";
        case ViolationCode::ArityMismatch: return "ArityMismatch";
        case ViolationCode::EmptyBody: return "EmptyBody";
        case ViolationCode::HeadNotQuery: return "HeadNotQuery";
        case ViolationCode::UnsafeVariable: return "UnsafeVariable";
        case ViolationCode::NonFiniteWeight: return "NonFiniteWeight";
        case ViolationCode::BadFormulaId: return "BadFormulaId";
    }
    return "Unknown";
}

static bool valid_name(const std::string& n) {
    if (n.empty() || !is_ident_start(n[0])) return false;
    return std::all_of(n.begin(), n.end(), is_ident_char);
}

static void check_atom(const Model& m, const Atom& a, int formula_id,
                       std::vector<Violation>& out) {
    if (a.predicate < 0 || a.predicate >= static_cast<int>(m.schemas.size())) {
        out.push_back({ViolationCode::UndeclaredPredicate,
                       "atom references undeclared predicate", formula_id, a.predicate});
        return;
    }
    const auto& schema = m.schemas[static_cast<size_t>(a.predicate)];
    if (static_cast<int>(a.args.size()) != schema.arity())
        out.push_back({ViolationCode::ArityMismatch,
                       "atom of '" + schema.name + "' has " + std::to_string(a.args.size()) +
                           " args, declared arity " + std::to_string(schema.arity()),
                       formula_id, a.predicate});
}

std::vector<Violation> validate_model(const Model& m) {
    std::vector<Violation> out;

    int query_count = 0;
    for (size_t i = 0; i < m.schemas.size(); ++i) {
        const auto& s = m.schemas[i];
        int pi = static_cast<int>(i);
        if (!valid_name(s.name))
            out.push_back({ViolationCode::BadPredicateName,
                           "predicate name '" + s.name + "' is not an identifier", -1, pi});
        if (s.arity() < 1)
            out.push_back({ViolationCode::BadArity,
                           "predicate '" + s.name + "' must have arity >= 1", -1, pi});
        for (size_t j = 0; j < i; ++j)
            if (m.schemas[j].name == s.name) {
                out.push_back({ViolationCode::DuplicatePredicate,
                               "duplicate declaration of '" + s.name + "'", -1, pi});
                break;
            }
        if (s.role == PredicateRole::Query) ++query_count;
    }
    if (query_count == 0)
        out.push_back({ViolationCode::NoQueryPredicate, "no query predicate declared", -1, -1});
    else if (query_count > 1)
        out.push_back({ViolationCode::MultipleQueryPredicates,
                       "more than one query predicate declared", -1, -1});

    for (size_t f = 0; f < m.formulas.size(); ++f) {
        const auto& wf = m.formulas[f];
        int fi = static_cast<int>(f);
        if (wf.id != fi)
            out.push_back({ViolationCode::BadFormulaId,
                           "formula id " + std::to_string(wf.id) + " does not match file order " +
                               std::to_string(fi),
                           fi, -1});
        if (!std::isfinite(wf.weight))
            out.push_back({ViolationCode::NonFiniteWeight, "formula weight is not finite", fi, -1});
        if (wf.body.empty())
            out.push_back({ViolationCode::EmptyBody, "formula body is empty", fi, -1});

        std::set<std::string> body_vars;
        for (const auto& lit : wf.body) {
            check_atom(m, lit.atom, fi, out);
            for (const auto& t : lit.atom.args)
                if (t.is_variable()) body_vars.insert(t.name);
        }
        check_atom(m, wf.head, fi, out);
        if (wf.head.predicate >= 0 && wf.head.predicate < static_cast<int>(m.schemas.size()) &&
            m.schemas[static_cast<size_t>(wf.head.predicate)].role != PredicateRole::Query)
            out.push_back({ViolationCode::HeadNotQuery,
                           "head predicate '" +
                               m.schemas[static_cast<size_t>(wf.head.predicate)].name +
                               "' is not the query predicate",
                           fi, wf.head.predicate});
        for (const auto& t : wf.head.args)
            if (t.is_variable() && !body_vars.count(t.name))
                out.push_back({ViolationCode::UnsafeVariable,
                               "head variable '" + t.name + "' does not appear in the body", fi,
                               -1});
    }
    return out;
}

namespace {

Atom parse_atom(LineCursor& cur, const Model& m, const std::string& query_name) {
    int name_col = cur.col();
    std::string name = cur.ident();
    int pred = m.predicate_index(name);
    if (pred < 0)
        throw ParseError("undeclared predicate '" + name + "'", cur.line, name_col);
    Atom a;
    a.predicate = pred;
    cur.expect('(', "after predicate name");
    a.args.push_back(Term::from_name(cur.ident()));
    while (!cur.done() && cur.peek() == ',') {
        ++cur.pos;
        a.args.push_back(Term::from_name(cur.ident()));
    }
    cur.expect(')', "after atom arguments");
    if (static_cast<int>(a.args.size()) != m.schemas[static_cast<size_t>(pred)].arity())
        throw ParseError("atom of '" + name + "' has " + std::to_string(a.args.size()) +
                             " args, declared arity " +
                             std::to_string(m.schemas[static_cast<size_t>(pred)].arity()),
                         cur.line, name_col);
    (void)query_name;
    return a;
}

void parse_decl(LineCursor& cur, Model& m, const std::string& query_name) {
    int name_col = cur.col();
    std::string name = cur.ident();
    if (m.predicate_index(name) >= 0)
        throw ParseError("duplicate declaration of '" + name + "'", cur.line, name_col);
    PredicateSchema schema;
    schema.name = name;
    schema.role = (name == query_name) ? PredicateRole::Query : PredicateRole::Evidence;
    cur.expect('(', "after predicate name");
    schema.params.push_back(cur.ident());
    while (!cur.done() && cur.peek() == ',') {
        ++cur.pos;
        schema.params.push_back(cur.ident());
    }
    cur.expect(')', "after declaration arguments");
    m.schemas.push_back(std::move(schema));
}

void parse_rule(LineCursor& cur, Model& m, const std::string& query_name) {
    WeightedFormula wf;
    wf.weight = cur.number();
    if (cur.done() || !is_ws(cur.peek()))
        cur.fail("expected whitespace after weight");
    cur.skip_ws();

    int rule_line = cur.line;
    for (;;) {
        Literal lit;
        if (!cur.done() && cur.peek() == '!') {
            ++cur.pos;
            cur.skip_ws();
            lit.negated = true;
        }
        lit.atom = parse_atom(cur, m, query_name);
        wf.body.push_back(std::move(lit));
        cur.skip_ws();
        if (!cur.done() && cur.peek() == '^') {
            ++cur.pos;
            cur.skip_ws();
            continue;
        }
        if (cur.pos + 1 < cur.s.size() && cur.peek() == '=' && cur.s[cur.pos + 1] == '>') {
            cur.pos += 2;
            cur.skip_ws();
            break;
        }
        cur.fail("expected '^' or '=>'");
    }

    int head_col = cur.col();
    wf.head = parse_atom(cur, m, query_name);
    if (m.schemas[static_cast<size_t>(wf.head.predicate)].role != PredicateRole::Query)
        throw ParseError(describe_role(query_name), rule_line, head_col);

    std::set<std::string> body_vars;
    for (const auto& lit : wf.body)
        for (const auto& t : lit.atom.args)
            if (t.is_variable()) body_vars.insert(t.name);
    for (const auto& t : wf.head.args)
        if (t.is_variable() && !body_vars.count(t.name))
            throw ParseError("head variable '" + t.name + "' does not appear in the body",
                             rule_line, head_col);

    wf.id = static_cast<int>(m.formulas.size());
    m.formulas.push_back(std::move(wf));
}

}  // namespace

Model parse_model(std::string_view text, const std::string& query_predicate) {
    Model m;
    int lineno = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        bool last = (end == std::string_view::npos);
        std::string_view raw = text.substr(start, last ? text.size() - start : end - start);
        start = last ? text.size() + 1 : end + 1;
        ++lineno;
        if (last && raw.empty()) break;

        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (size_t c = raw.find("//"); c != std::string_view::npos) raw = raw.substr(0, c);

        LineCursor cur{raw, 0, lineno};
        cur.skip_ws();
        if (cur.done()) continue;

        char c = cur.peek();
        if (is_ident_start(c))
            parse_decl(cur, m, query_predicate);
        else if ((c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.')
            parse_rule(cur, m, query_predicate);
        else
            cur.fail("expected declaration or rule");

        cur.skip_ws();
        if (!cur.done()) cur.fail("trailing input after statement");
    }

    // The per-line checks catch everything they can see; the whole-model pass
    // catches the rest (e.g. the query predicate was never declared).
    auto violations = validate_model(m);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw ParseError(std::string(to_string(v.code)) + ": " + v.message, 0, 0);
    }
    return m;
}

static void format_atom(std::ostringstream& os, const Model& m, const Atom& a) {
    os << m.schemas[static_cast<size_t>(a.predicate)].name << '(';
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) os << ',';
        os << a.args[i].name;
    }
    os << ')';
}

std::string format_weight(double w) {
    char buf[64];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*f", prec, w);
        double back = 0.0;
        std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
        if (std::fabs(back - w) <= 1e-9) break;
    }
    return buf;
}

std::string format_model(const Model& m) {
    std::ostringstream os;
    for (const auto& s : m.schemas) {
        os << s.name << '(';
        for (size_t i = 0; i < s.params.size(); ++i) {
            if (i) os << ',';
            os << s.params[i];
        }
        os << ")\n";
    }
    for (const auto& wf : m.formulas) {
        os << format_weight(wf.weight) << ' ';
        for (size_t i = 0; i < wf.body.size(); ++i) {
            if (i) os << " ^ ";
            if (wf.body[i].negated) os << '!';
            format_atom(os, m, wf.body[i].atom);
        }
        os << " => ";
        format_atom(os, m, wf.head);
        os << '\n';
    }
    return os.str();
}

bool models_equal(const Model& a, const Model& b, double weight_tol) {
    if (a.schemas != b.schemas) return false;
    if (a.formulas.size() != b.formulas.size()) return false;
    for (size_t i = 0; i < a.formulas.size(); ++i) {
        const auto& fa = a.formulas[i];
        const auto& fb = b.formulas[i];
        if (fa.id != fb.id || fa.body != fb.body || !(fa.head == fb.head)) return false;
        if (!(std::fabs(fa.weight - fb.weight) <= weight_tol)) return false;
    }
    return true;
}

std::vector<double> model_weights(const Model& m) {
    std::vector<double> w;
    w.reserve(m.formulas.size());
    for (const auto& f : m.formulas) w.push_back(f.weight);
    return w;
}

Model with_weights(const Model& m, const std::vector<double>& weights) {
    if (weights.size() != m.formulas.size())
        throw InputError("weight vector size " + std::to_string(weights.size()) +
                         " does not match formula count " + std::to_string(m.formulas.size()));
    Model out = m;
    for (size_t i = 0; i < weights.size(); ++i) out.formulas[i].weight = weights[i];
    return out;
}

}  // namespace mmln
