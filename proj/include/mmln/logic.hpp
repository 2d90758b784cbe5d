#ifndef MMLN_LOGIC_HPP
#define MMLN_LOGIC_HPP

#include <string>
#include <string_view>
#include <vector>

#include "mmln/common.hpp"

namespace mmln {

// ---------------------------------------------------------------------------
// Rule language
//
// A model is a set of predicate declarations plus weighted implications
//
//     2.000000 Fever(x) ^ Consolidation(x) => Pneumonia(x)
//
// whose head is always a positive atom of the single query predicate.
// Bodies are conjunctions of literals; `!` negates a body literal.
// ---------------------------------------------------------------------------

enum class PredicateRole { Evidence, Query };

struct PredicateSchema {
    std::string name;
    std::vector<std::string> params;  // argument names as declared, e.g. Fever(case)
    PredicateRole role = PredicateRole::Evidence;

    int arity() const { return static_cast<int>(params.size()); }
    bool operator==(const PredicateSchema&) const = default;
};

struct Term {
    enum class Kind { Variable, Constant };
    Kind kind = Kind::Variable;
    std::string name;

    // Lowercase first letter => variable, uppercase => constant.
    static Term from_name(std::string n);
    static Term variable(std::string n) { return {Kind::Variable, std::move(n)}; }
    static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }

    bool is_variable() const { return kind == Kind::Variable; }
    bool operator==(const Term&) const = default;
};

// Atom inside a Model; the predicate is an index into Model::schemas.
struct Atom {
    int predicate = -1;
    std::vector<Term> args;
    bool operator==(const Atom&) const = default;
};

struct Literal {
    Atom atom;
    bool negated = false;
    bool operator==(const Literal&) const = default;
};

// body_1 ^ ... ^ body_k => head, with log-linear weight.
struct WeightedFormula {
    double weight = 0.0;
    std::vector<Literal> body;
    Atom head;
    int id = -1;  // position in file order; stable identity for reported weights
};

struct Model {
    std::vector<PredicateSchema> schemas;
    std::vector<WeightedFormula> formulas;

    int predicate_index(std::string_view name) const;
    // Index of the (single) Query-role schema, or -1.
    int query_predicate() const;
};

// ---------------------------------------------------------------------------
// Validation. Violations are data, not exceptions; parse_model refuses to
// return any model that has one.
// ---------------------------------------------------------------------------

enum class ViolationCode {
    BadPredicateName,
    BadArity,
    DuplicatePredicate,
    NoQueryPredicate,
    MultipleQueryPredicates,
    UndeclaredPredicate,
    ArityMismatch,
    EmptyBody,
    HeadNotQuery,
    UnsafeVariable,
    NonFiniteWeight,
    BadFormulaId,  // ids must equal file order
};

std::string_view to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string message;
    int formula = -1;    // offending formula id, if any
    int predicate = -1;  // offending schema index, if any
};

std::vector<Violation> validate_model(const Model& model);

// ---------------------------------------------------------------------------
// Parse / format
// ---------------------------------------------------------------------------

// Parses a rule file. The predicate whose name equals `query_predicate` gets
// the Query role; everything else is Evidence. Throws ParseError (with
// 1-based line/column) on syntax errors and on any validation violation, so
// no partial model ever escapes.
Model parse_model(std::string_view text, const std::string& query_predicate = "Pneumonia");

// Canonical text form: declarations in order, then one rule per line.
// parse_model(format_model(m)) is structurally equal to m with weights
// preserved to 1e-9.
std::string format_model(const Model& model);

// Fixed-point weight rendering, at least 6 decimals, extended as needed so
// the printed value parses back within 1e-9.
std::string format_weight(double w);

// Structural equality; weights compared within weight_tol.
bool models_equal(const Model& a, const Model& b, double weight_tol = 1e-9);

// Copy of the per-formula weights, in id order.
std::vector<double> model_weights(const Model& model);

// Same model with formula weights replaced (size must match).
Model with_weights(const Model& model, const std::vector<double>& weights);

}  // namespace mmln

#endif
