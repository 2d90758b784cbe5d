#ifndef MMLN_GROUNDING_HPP
#define MMLN_GROUNDING_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmln/logic.hpp"

namespace mmln {

enum class Provenance { Text, Image, Synthetic };

// Fully ground atom, predicate referenced by name so evidence files stand on
// their own (they are parsed without a model in scope).
struct GroundAtom {
    std::string predicate;
    std::vector<std::string> args;

    auto operator<=>(const GroundAtom&) const = default;
};

std::string to_string(const GroundAtom& atom);

// Set of positive ground atoms plus the registry of patient constants.
// Constants keep first-appearance order; a constant may have zero atoms
// (an asymptomatic case).
class EvidenceDB {
public:
    void add_constant(const std::string& c);
    // Registers the atom's args as constants as a side effect. Duplicate
    // atoms are idempotent (first provenance wins).
    void add_atom(GroundAtom atom, Provenance prov);

    bool has_constant(const std::string& c) const { return index_.count(c) > 0; }
    bool has_atom(const GroundAtom& atom) const { return atoms_.count(atom) > 0; }
    const std::vector<std::string>& constants() const { return order_; }
    const std::map<GroundAtom, Provenance>& atoms() const { return atoms_; }
    size_t atom_count() const { return atoms_.size(); }

    std::vector<GroundAtom> atoms_of(const std::string& constant) const;

    // One atom per line, `//` comments and blank lines ignored. A line
    // `!Pred(C)` registers C without asserting the atom, so cases with no
    // positive evidence survive a file round-trip (Alchemy's convention).
    static EvidenceDB parse(std::string_view text, Provenance prov);
    static EvidenceDB load(const std::filesystem::path& path, Provenance prov);
    std::string format() const;
    void save(const std::filesystem::path& path) const;

private:
    std::map<GroundAtom, Provenance> atoms_;
    std::vector<std::string> order_;
    std::unordered_map<std::string, int> index_;
};

// Complete truth assignment over the ground atoms of one case. With the
// per-case domain {case}, the atom universe is exactly one ground atom per
// declared predicate, so atom id == predicate index.
struct World {
    std::string case_id;
    std::vector<uint8_t> truth;  // indexed by predicate

    bool value(int atom) const { return truth[static_cast<size_t>(atom)] != 0; }
    void set(int atom, bool v) { truth[static_cast<size_t>(atom)] = v ? 1 : 0; }
};

// Ground literal; atom == -1 marks a literal whose constant is not the
// current case (no covering world slot exists).
struct GroundLiteral {
    int atom = -1;
    bool negated = false;
};

struct Grounding {
    std::vector<GroundLiteral> body;
    int head_atom = -1;
};

// Per-case instantiations, indexed by formula id. With a single case
// variable every formula has exactly one grounding.
struct GroundingTable {
    std::string case_id;
    std::vector<std::vector<Grounding>> formulas;

    size_t formula_count() const { return formulas.size(); }
};

// Closed-world completion: evidence atoms present in the db are true, absent
// ones false; query atoms are set false by convention (inference flips them).
// Atoms in the db whose predicate is not declared in the model are ignored.
World closed_world_complete(const EvidenceDB& db, const Model& model, const std::string& case_id);

GroundingTable ground_formulas(const Model& model, const std::string& case_id);

bool grounding_satisfied(const Grounding& g, const World& world);

// n_i = number of groundings of formula i whose implication holds in world.
std::vector<int> count_true_groundings(const GroundingTable& table, const World& world);

// Explicit query-atom labels parsed from a label file. Positive lines
// `Pneumonia(P1)` mean true, `!Pneumonia(P1)` false; cases not listed are
// false under the closed-world reading.
class LabelSet {
public:
    void set(const std::string& case_id, bool value);
    bool label(const std::string& case_id) const;  // closed world: absent => false
    bool has(const std::string& case_id) const { return values_.count(case_id) > 0; }
    const std::vector<std::string>& order() const { return order_; }
    const std::string& predicate() const { return predicate_; }
    void set_predicate(std::string p) { predicate_ = std::move(p); }

    static LabelSet parse(std::string_view text);
    static LabelSet load(const std::filesystem::path& path);
    // Writes every known case, negatives as `!Pred(C)`.
    std::string format() const;
    void save(const std::filesystem::path& path) const;

private:
    std::string predicate_ = "Pneumonia";
    std::map<std::string, bool> values_;
    std::vector<std::string> order_;
};

}  // namespace mmln

#endif
