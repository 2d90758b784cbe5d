#include "mmln/grounding.hpp"

#include <optional>
#include <sstream>

namespace mmln {

namespace {

bool is_ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9') || c == '_';
}

struct AtomLine {
    bool negated = false;
    GroundAtom atom;
};

// `["!"] Pred "(" Const ("," Const)* ")"`, nullopt for blank lines.
std::optional<AtomLine> parse_atom_line(std::string_view raw, int lineno) {
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (size_t c = raw.find("//"); c != std::string_view::npos) raw = raw.substr(0, c);

    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t')) ++pos;
    };
    auto fail = [&](const std::string& msg) -> void {
        throw ParseError(msg, lineno, static_cast<int>(pos) + 1);
    };
    auto ident = [&]() -> std::string {
        if (pos >= raw.size() || !is_ident_start(raw[pos])) fail("expected identifier");
        size_t begin = pos;
        while (pos < raw.size() && is_ident_char(raw[pos])) ++pos;
        return std::string(raw.substr(begin, pos - begin));
    };

    skip_ws();
    if (pos >= raw.size()) return std::nullopt;

    AtomLine out;
    if (raw[pos] == '!') {
        out.negated = true;
        ++pos;
        skip_ws();
    }
    out.atom.predicate = ident();
    if (pos >= raw.size() || raw[pos] != '(') fail("expected '(' after predicate name");
    ++pos;
    out.atom.args.push_back(ident());
    while (pos < raw.size() && raw[pos] == ',') {
        ++pos;
        out.atom.args.push_back(ident());
    }
    if (pos >= raw.size() || raw[pos] != ')') fail("expected ')' after arguments");
    ++pos;
    skip_ws();
    if (pos < raw.size()) fail("trailing input after atom");
    return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    int lineno = 0;
    size_t start = 0;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        bool last = (end == std::string_view::npos);
        std::string_view raw = text.substr(start, last ? text.size() - start : end - start);
        start = last ? text.size() + 1 : end + 1;
        ++lineno;
        if (last && raw.empty()) break;
        fn(raw, lineno);
    }
}

}  // namespace

std::string to_string(const GroundAtom& atom) {
    std::string s = atom.predicate + "(";
    for (size_t i = 0; i < atom.args.size(); ++i) {
        if (i) s += ',';
        s += atom.args[i];
    }
    s += ')';
    return s;
}

void EvidenceDB::add_constant(const std::string& c) {
    if (index_.emplace(c, static_cast<int>(order_.size())).second) order_.push_back(c);
}

void EvidenceDB::add_atom(GroundAtom atom, Provenance prov) {
    for (const auto& a : atom.args) add_constant(a);
    atoms_.emplace(std::move(atom), prov);
}

std::vector<GroundAtom> EvidenceDB::atoms_of(const std::string& constant) const {
    std::vector<GroundAtom> out;
    for (const auto& [atom, prov] : atoms_) {
        bool all = !atom.args.empty();
        for (const auto& a : atom.args)
            if (a != constant) {
                all = false;
                break;
            }
        if (all) out.push_back(atom);
    }
    return out;
}

EvidenceDB EvidenceDB::parse(std::string_view text, Provenance prov) {
    EvidenceDB db;
    for_each_line(text, [&](std::string_view raw, int lineno) {
        auto line = parse_atom_line(raw, lineno);
        if (!line) return;
        if (line->negated) {
            for (const auto& a : line->atom.args) db.add_constant(a);
        } else {
            db.add_atom(std::move(line->atom), prov);
        }
    });
    return db;
}

EvidenceDB EvidenceDB::load(const std::filesystem::path& path, Provenance prov) {
    return parse(read_file(path), prov);
}

std::string EvidenceDB::format() const {
    std::string out;
    for (const auto& [atom, prov] : atoms_) {
        out += to_string(atom);
        out += '\n';
    }
    return out;
}

void EvidenceDB::save(const std::filesystem::path& path) const {
    write_file_atomic(path, format());
}

World closed_world_complete(const EvidenceDB& db, const Model& model,
                            const std::string& case_id) {
    if (!db.has_constant(case_id))
        throw InputError("unknown case constant '" + case_id + "'");
    World w;
    w.case_id = case_id;
    w.truth.assign(model.schemas.size(), 0);
    GroundAtom probe;
    for (size_t p = 0; p < model.schemas.size(); ++p) {
        const auto& schema = model.schemas[p];
        if (schema.role != PredicateRole::Evidence) continue;  // query stays false
        probe.predicate = schema.name;
        probe.args.assign(static_cast<size_t>(schema.arity()), case_id);
        if (db.has_atom(probe)) w.truth[p] = 1;
    }
    return w;
}

GroundingTable ground_formulas(const Model& model, const std::string& case_id) {
    GroundingTable table;
    table.case_id = case_id;
    table.formulas.resize(model.formulas.size());

    auto ground_atom = [&](const Atom& a) -> int {
        // The world slot exists only for pred(case,...,case).
        for (const auto& t : a.args) {
            const std::string& value = t.is_variable() ? case_id : t.name;
            if (value != case_id) return -1;
        }
        return a.predicate;
    };

    for (size_t f = 0; f < model.formulas.size(); ++f) {
        const auto& wf = model.formulas[f];
        Grounding g;
        g.body.reserve(wf.body.size());
        for (const auto& lit : wf.body)
            g.body.push_back({ground_atom(lit.atom), lit.negated});
        g.head_atom = ground_atom(wf.head);
        table.formulas[f].push_back(std::move(g));
    }
    return table;
}

static void require_covered(int atom, const World& world) {
    if (atom < 0 || atom >= static_cast<int>(world.truth.size()))
        throw InputError("ground atom not covered by world of case '" + world.case_id + "'");
}

bool grounding_satisfied(const Grounding& g, const World& world) {
    require_covered(g.head_atom, world);
    bool body_true = true;
    for (const auto& lit : g.body) {
        require_covered(lit.atom, world);
        bool v = world.value(lit.atom);
        if (lit.negated) v = !v;
        if (!v) body_true = false;  // no short-circuit: coverage errors stay deterministic
    }
    return !body_true || world.value(g.head_atom);
}

std::vector<int> count_true_groundings(const GroundingTable& table, const World& world) {
    std::vector<int> counts(table.formulas.size(), 0);
    for (size_t f = 0; f < table.formulas.size(); ++f)
        for (const auto& g : table.formulas[f])
            if (grounding_satisfied(g, world)) ++counts[f];
    return counts;
}

void LabelSet::set(const std::string& case_id, bool value) {
    auto [it, inserted] = values_.emplace(case_id, value);
    if (inserted)
        order_.push_back(case_id);
    else
        it->second = value;
}

bool LabelSet::label(const std::string& case_id) const {
    auto it = values_.find(case_id);
    return it != values_.end() && it->second;
}

LabelSet LabelSet::parse(std::string_view text) {
    LabelSet out;
    bool first = true;
    for_each_line(text, [&](std::string_view raw, int lineno) {
        auto line = parse_atom_line(raw, lineno);
        if (!line) return;
        if (line->atom.args.size() != 1)
            throw ParseError("label atoms must be unary", lineno, 1);
        if (first) {
            out.predicate_ = line->atom.predicate;
            first = false;
        } else if (line->atom.predicate != out.predicate_) {
            throw ParseError("mixed label predicates '" + out.predicate_ + "' and '" +
                                 line->atom.predicate + "'",
                             lineno, 1);
        }
        out.set(line->atom.args[0], !line->negated);
    });
    return out;
}

LabelSet LabelSet::load(const std::filesystem::path& path) {
    return parse(read_file(path));
}

std::string LabelSet::format() const {
    std::string out;
    for (const auto& c : order_) {
        if (!values_.at(c)) out += '!';
        out += predicate_ + "(" + c + ")\n";
    }
    return out;
}

void LabelSet::save(const std::filesystem::path& path) const {
    write_file_atomic(path, format());
}

}  // namespace mmln
