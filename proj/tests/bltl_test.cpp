#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <stdexcept>

#include "pnsmc/bltl.hpp"
#include "pnsmc/errors.hpp"
#include "test_traces.hpp"

using namespace pnsmc;
using testtraces::make_trace;
using testtraces::Row;

TEST_CASE("parses a case-study style property") {
    ParseResult r = parse_property("F<=720 (number_sensors < 37 & proci_status = 2)");
    CHECK(r.warnings.empty());
    const FormulaPtr& f = r.formula;
    REQUIRE(f->kind() == FormulaKind::Eventually);
    CHECK(f->bound().kind == Bound::Kind::Time);
    CHECK(f->bound().time == 720.0);
    const FormulaPtr& body = f->lhs();
    REQUIRE(body->kind() == FormulaKind::And);
    CHECK(body->lhs()->kind() == FormulaKind::Atom);
    CHECK(body->lhs()->atom().name == "number_sensors");
    CHECK(body->lhs()->atom().op == CompareOp::Lt);
    CHECK(body->lhs()->atom().constant == 37.0);
    CHECK(body->rhs()->atom().op == CompareOp::Eq);
}

TEST_CASE("operator precedence and associativity") {
    // -> is weakest and right-associative
    FormulaPtr f = parse_property("p -> q | r -> s").formula;
    REQUIRE(f->kind() == FormulaKind::Implies);
    CHECK(f->lhs()->atom().name == "p");
    REQUIRE(f->rhs()->kind() == FormulaKind::Implies);
    CHECK(f->rhs()->lhs()->kind() == FormulaKind::Or);

    // | binds looser than &
    FormulaPtr g = parse_property("p | q & r").formula;
    REQUIRE(g->kind() == FormulaKind::Or);
    CHECK(g->rhs()->kind() == FormulaKind::And);

    // U binds tighter than & and is right-associative
    FormulaPtr h = parse_property("p & q U<=5 r").formula;
    REQUIRE(h->kind() == FormulaKind::And);
    CHECK(h->rhs()->kind() == FormulaKind::Until);

    FormulaPtr u = parse_property("p U<=2 q U<=3 r").formula;
    REQUIRE(u->kind() == FormulaKind::Until);
    CHECK(u->bound().time == 2.0);
    REQUIRE(u->rhs()->kind() == FormulaKind::Until);
    CHECK(u->rhs()->bound().time == 3.0);

    // prefix operators bind tightest
    FormulaPtr n = parse_property("!p U<=5 F#3 q").formula;
    REQUIRE(n->kind() == FormulaKind::Until);
    CHECK(n->lhs()->kind() == FormulaKind::Not);
    REQUIRE(n->rhs()->kind() == FormulaKind::Eventually);
    CHECK(n->rhs()->bound().kind == Bound::Kind::Steps);
    CHECK(n->rhs()->bound().steps == 3);
}

TEST_CASE("booleans, parentheses, and comparison spellings") {
    CHECK(parse_property("true").formula->kind() == FormulaKind::True);
    CHECK(parse_property("false").formula->kind() == FormulaKind::False);
    CHECK(parse_property("((p))").formula->kind() == FormulaKind::Atom);
    for (const char* text : {"x < 1", "x <= 1", "x = 1", "x != 1", "x >= 1", "x > 1"}) {
        FormulaPtr f = parse_property(text).formula;
        REQUIRE(f->kind() == FormulaKind::Atom);
        CHECK(f->atom().op.has_value());
    }
    FormulaPtr neg = parse_property("x >= -2.5").formula;
    CHECK(neg->atom().constant == -2.5);
}

TEST_CASE("parse errors carry 1-based positions") {
    CHECK_THROWS_AS(parse_property(""), ParseError);
    CHECK_THROWS_AS(parse_property("F<= p"), ParseError);
    CHECK_THROWS_AS(parse_property("(p"), ParseError);
    CHECK_THROWS_AS(parse_property("p >"), ParseError);
    CHECK_THROWS_AS(parse_property("p U q"), ParseError);   // until needs a bound
    CHECK_THROWS_AS(parse_property("p & & q"), ParseError);
    CHECK_THROWS_AS(parse_property("F<=0 p"), ParseError);  // time bounds are positive
    CHECK_THROWS_AS(parse_property("F#0 p"), ParseError);   // step bounds start at 1
    CHECK_THROWS_AS(parse_property("p\n& &"), ParseError);
    try {
        parse_property("p\n& & q");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }
}

TEST_CASE("mixing time and step bounds is a warning, not an error") {
    ParseResult mixed = parse_property("F<=5 (p U#3 q)");
    CHECK_FALSE(mixed.warnings.empty());
    CHECK(parse_property("F<=5 (p U<=3 q)").warnings.empty());
    CHECK(parse_property("F#5 (p U#3 q)").warnings.empty());
}

TEST_CASE("print emits canonical re-parseable text") {
    CHECK(print(parse_property("F<=720 (number_sensors < 37 & proci_status = 2)").formula) ==
          "F<=720 (number_sensors < 37 & proci_status = 2)");
    CHECK(print(parse_property("!shutdown U<=86400 failure_1").formula) ==
          "!shutdown U<=86400 failure_1");
    CHECK(print(parse_property("p|q&r").formula) == "p | q & r");
    CHECK(print(parse_property("(p|q)&r").formula) == "(p | q) & r");
    CHECK(print(parse_property("x >= 0.25").formula) == "x >= 0.25");
}

TEST_CASE("parse of print is the identity on random formulas") {
    std::mt19937 gen(2024);
    for (int i = 0; i < 1000; ++i) {
        FormulaPtr f = testtraces::random_formula(gen, 4);
        ParseResult back = parse_property(print(f));
        CHECK(equal(back.formula, f));
    }
}

TEST_CASE("structural equality distinguishes bounds and shapes") {
    FormulaPtr a = parse_property("p U<=2 q").formula;
    CHECK(equal(a, parse_property("p U<=2 q").formula));
    CHECK_FALSE(equal(a, parse_property("p U<=3 q").formula));
    CHECK_FALSE(equal(a, parse_property("p U#2 q").formula));
    CHECK_FALSE(equal(a, parse_property("q U<=2 p").formula));
    CHECK_FALSE(equal(parse_property("x < 1").formula, parse_property("x <= 1").formula));
}

TEST_CASE("proposition resolution substitutes bare atoms only") {
    PropositionTable table;
    table["sd"] = parse_property("p | q").formula;
    FormulaPtr f = resolve(parse_property("F<=5 sd").formula, table);
    CHECK(print(f) == "F<=5 (p | q)");

    // a comparison atom with the same name is not a proposition reference
    FormulaPtr g = resolve(parse_property("sd > 3").formula, table);
    CHECK(print(g) == "sd > 3");

    // unknown names pass through untouched
    CHECK(print(resolve(parse_property("other").formula, table)) == "other");
}

TEST_CASE("total_time_bound follows the deepest nesting path") {
    CHECK(total_time_bound(parse_property("F<=5 G<=3 p").formula, 0.0) == 8.0);
    CHECK(total_time_bound(parse_property("F<=5 p & G<=7 q").formula, 0.0) == 7.0);
    CHECK(total_time_bound(parse_property("p U<=4 F<=2 q").formula, 0.0) == 6.0);
    CHECK(total_time_bound(parse_property("p").formula, 0.0) == 0.0);
    // step bounds convert through the tick period
    CHECK(total_time_bound(parse_property("F#3 p").formula, 2.0) == 6.0);
    CHECK(total_time_bound(parse_property("F#3 p").formula, 0.0) == 0.0);
    CHECK(total_time_bound(parse_property("F#2 G<=5 p").formula, 1.0) == 7.0);

    CHECK(has_step_bound(parse_property("F#3 p").formula));
    CHECK(has_step_bound(parse_property("G<=9 (p U#1 q)").formula));
    CHECK_FALSE(has_step_bound(parse_property("G<=9 (p U<=1 q)").formula));
}

TEST_CASE("bound factories validate their ranges") {
    CHECK_THROWS_AS(Bound::time_bound(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Bound::time_bound(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(Bound::step_bound(0), std::invalid_argument);
    CHECK_NOTHROW(Bound::time_bound(0.001));
    CHECK_NOTHROW(Bound::step_bound(1));
}

TEST_CASE("offline evaluation of timed operators") {
    ExecutionTrace trace = make_trace({{0.0, false, false, 0.0, 0},
                                       {1.0, false, true, 0.5, 1},
                                       {2.0, true, false, 1.0, 2}});
    CHECK(evaluate(parse_property("F<=2 p").formula, trace, 0));
    CHECK_FALSE(evaluate(parse_property("F<=1 p").formula, trace, 0));   // p late
    CHECK(evaluate(parse_property("F<=1 p").formula, trace, 1));         // suffix bound is relative
    CHECK(evaluate(parse_property("G<=1 !p").formula, trace, 0));
    CHECK_FALSE(evaluate(parse_property("G<=2 !p").formula, trace, 0));
    CHECK(evaluate(parse_property("!p U<=1 q").formula, trace, 0));
    CHECK(evaluate(parse_property("!p U<=2 (x > 0.9)").formula, trace, 0));
    CHECK_FALSE(evaluate(parse_property("q U<=2 (x > 0.9)").formula, trace, 0));  // hold fails at 0
    CHECK(evaluate(parse_property("n = 0 U<=1 n = 1").formula, trace, 0));
    CHECK(evaluate(parse_property("x < 0.25 -> q").formula, trace, 1));
    CHECK_FALSE(evaluate(parse_property("q").formula, trace, 2));
}

TEST_CASE("offline evaluation of step-bounded operators") {
    ExecutionTrace trace = make_trace({{0.0, false, false, 0.0, 0},
                                       {0.5, false, false, 0.0, 1},
                                       {3.0, true, false, 0.0, 2}});
    CHECK(evaluate(parse_property("F#2 p").formula, trace, 0));   // witness two samples later
    CHECK_FALSE(evaluate(parse_property("F#1 p").formula, trace, 0));
    CHECK(evaluate(parse_property("G#1 !p").formula, trace, 0));
    CHECK_FALSE(evaluate(parse_property("G#2 !p").formula, trace, 0));
    // an until with no witness in the remaining samples is false
    CHECK_FALSE(evaluate(parse_property("true U#8 q").formula, trace, 0));
    CHECK(evaluate(parse_property("true U#8 p").formula, trace, 0));
}

TEST_CASE("evaluation rejects bad inputs") {
    ExecutionTrace trace = make_trace({{0.0, false, false, 0.0, 0}});
    CHECK_THROWS_AS(evaluate(parse_property("missing").formula, trace, 0), EvalError);
    CHECK_THROWS_AS(evaluate(parse_property("p > 1").formula, trace, 0), EvalError);  // Bool compare
    CHECK_THROWS_AS(evaluate(parse_property("x").formula, trace, 0), EvalError);      // bare Real
    CHECK_THROWS_AS(evaluate(parse_property("p").formula, trace, 1), std::out_of_range);
}

TEST_CASE("comparison semantics on numeric kinds") {
    ExecutionTrace trace = make_trace({{0.0, false, false, 0.5, 2}});
    CHECK(evaluate(parse_property("x = 0.5").formula, trace, 0));
    CHECK(evaluate(parse_property("n >= 2").formula, trace, 0));
    CHECK(evaluate(parse_property("n <= 2").formula, trace, 0));
    CHECK_FALSE(evaluate(parse_property("n != 2").formula, trace, 0));
    CHECK(evaluate(parse_property("n > 1.5").formula, trace, 0));  // Int compared as a number
}
