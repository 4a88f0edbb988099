#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pnsmc/trace.hpp"

namespace pnsmc {

enum class CompareOp { Lt, Le, Eq, Ne, Ge, Gt };

std::string_view to_string(CompareOp op);

/// Atomic proposition: a bare Boolean variable, or a comparison of a numeric
/// variable against a constant.
struct Atom {
    std::string name;
    std::optional<CompareOp> op;  // nullopt: bare Boolean variable
    double constant = 0.0;
    bool integer_constant = false;  // printed without a decimal point
};

/// Temporal bound: relative time budget (> 0) or sample-count budget (>= 1).
struct Bound {
    enum class Kind { Time, Steps };
    Kind kind = Kind::Time;
    double time = 0.0;
    std::int64_t steps = 0;

    static Bound time_bound(double t);
    static Bound step_bound(std::int64_t n);
};

enum class FormulaKind { True, False, Atom, Not, And, Or, Implies, Until, Eventually, Globally };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable bounded-LTL formula node. Eventually and Globally are stored
/// as their own node kinds but keep the derived-form semantics
/// F b f == true U b f and G b f == !(F b !f).
class Formula {
public:
    FormulaKind kind() const { return kind_; }
    const Atom& atom() const { return atom_; }
    const FormulaPtr& lhs() const { return lhs_; }
    const FormulaPtr& rhs() const { return rhs_; }
    const Bound& bound() const { return bound_; }

    static FormulaPtr make_true();
    static FormulaPtr make_false();
    static FormulaPtr make_atom(Atom a);
    static FormulaPtr variable(std::string name);
    static FormulaPtr compare(std::string name, CompareOp op, double constant);
    static FormulaPtr negation(FormulaPtr f);
    static FormulaPtr conjunction(FormulaPtr l, FormulaPtr r);
    static FormulaPtr disjunction(FormulaPtr l, FormulaPtr r);
    static FormulaPtr implication(FormulaPtr l, FormulaPtr r);
    static FormulaPtr until(FormulaPtr l, FormulaPtr r, Bound b);
    static FormulaPtr eventually(FormulaPtr f, Bound b);
    static FormulaPtr globally(FormulaPtr f, Bound b);

private:
    Formula(FormulaKind kind, Atom atom, FormulaPtr lhs, FormulaPtr rhs, Bound bound)
        : kind_(kind), atom_(std::move(atom)), lhs_(std::move(lhs)), rhs_(std::move(rhs)), bound_(bound) {}

    FormulaKind kind_;
    Atom atom_;
    FormulaPtr lhs_;
    FormulaPtr rhs_;
    Bound bound_;
};

/// Structural equality.
bool equal(const FormulaPtr& a, const FormulaPtr& b);

/// Re-parseable text form; parse_property(print(f)).formula is structurally
/// equal to f.
std::string print(const FormulaPtr& f);

struct ParseResult {
    FormulaPtr formula;
    std::vector<std::string> warnings;
};

/// Parses property text.
///
///   formula := implication over '->' (right-assoc, weakest)
///   then '|', '&', 'U' bound (right-assoc), prefix '!' / 'F' bound /
///   'G' bound (strongest), primaries: true, false, atom, '(' formula ')'
///   bound := '<=' number | '#' integer
///   atom  := ident | ident op number,  op in { <, <=, =, !=, >=, > }
///
/// Throws ParseError with 1-based line/column. Mixing time and step bounds
/// in one property is legal but reported as a warning.
ParseResult parse_property(std::string_view text);

/// Map of named propositions to their defining formulas.
using PropositionTable = std::map<std::string, FormulaPtr, std::less<>>;

/// Replaces every bare-variable atom whose name appears in the table with
/// the named proposition's formula.
FormulaPtr resolve(const FormulaPtr& f, const PropositionTable& propositions);

/// Simulation horizon needed to decide the formula from t = 0: the sum of
/// bounds along the deepest nesting path. Step bounds convert to time via
/// the tick period (tick_dt), or contribute nothing if tick_dt is 0.
double total_time_bound(const FormulaPtr& f, double tick_dt);

/// True if any bound in the formula is a step bound.
bool has_step_bound(const FormulaPtr& f);

/// Offline three-valued-free evaluation of the suffix starting at sample k.
/// On this finite trace an until with no witness among the remaining
/// samples is false. Throws std::out_of_range if k >= trace length, and
/// EvalError for unknown variables or kind mismatches.
bool evaluate(const FormulaPtr& f, const ExecutionTrace& trace, std::size_t k);

}  // namespace pnsmc
