#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "pnsmc/bltl.hpp"
#include "pnsmc/errors.hpp"
#include "pnsmc/monitor.hpp"
#include "test_traces.hpp"

using namespace pnsmc;
using testtraces::make_trace;
using testtraces::Row;

namespace {

Verdict monitor_verdict(const FormulaPtr& f, const ExecutionTrace& trace) {
    Monitor m(f, trace.schema);
    for (const TimedSample& s : trace.samples) {
        m.feed(s);
        if (m.conclusive()) break;
    }
    m.finish();
    return m.verdict();
}

}  // namespace

TEST_CASE("hand-checked timed verdicts") {
    ExecutionTrace trace = make_trace({{0.0, false, false, 0.0, 0},
                                       {1.0, false, true, 0.5, 1},
                                       {2.0, true, false, 1.0, 2}});
    CHECK(monitor_verdict(parse_property("F<=2 p").formula, trace) == Verdict::True);
    CHECK(monitor_verdict(parse_property("F<=1 p").formula, trace) == Verdict::False);
    CHECK(monitor_verdict(parse_property("G<=1 !p").formula, trace) == Verdict::True);
    CHECK(monitor_verdict(parse_property("G<=2 !p").formula, trace) == Verdict::False);
    CHECK(monitor_verdict(parse_property("!p U<=1 q").formula, trace) == Verdict::True);
    CHECK(monitor_verdict(parse_property("q U<=2 (x > 0.9)").formula, trace) == Verdict::False);
}

TEST_CASE("verdicts become conclusive as early as possible") {
    ExecutionTrace trace = make_trace({{0.0, true, false, 0.0, 0},
                                       {1.0, true, false, 0.0, 1},
                                       {5.0, true, false, 0.0, 2}});

    // a satisfied eventually concludes on the witness sample
    Monitor f_now(parse_property("F<=10 p").formula, trace.schema);
    f_now.feed(trace.samples[0]);
    CHECK(f_now.conclusive());
    CHECK(f_now.verdict() == Verdict::True);

    // a violated globally concludes immediately too
    Monitor g_now(parse_property("G<=10 !p").formula, trace.schema);
    g_now.feed(trace.samples[0]);
    CHECK(g_now.conclusive());
    CHECK(g_now.verdict() == Verdict::False);

    // a time bound collapses as soon as a later sample overshoots it
    Monitor late(parse_property("F<=3 q").formula, trace.schema);
    late.feed(trace.samples[0]);
    late.feed(trace.samples[1]);
    CHECK_FALSE(late.conclusive());
    late.feed(trace.samples[2]);  // t=5 exceeds the bound; q never held
    CHECK(late.conclusive());
    CHECK(late.verdict() == Verdict::False);

    // zero-elapsed feeds keep a live bound alive (boundary is inclusive)
    Monitor edge(parse_property("F<=1 q").formula, trace.schema);
    edge.feed(0.0, trace.samples[0].values);
    edge.feed(1.0, trace.samples[0].values);
    CHECK_FALSE(edge.conclusive());  // q could still hold exactly at t=1+0
}

TEST_CASE("finish closes out undecided residuals") {
    ExecutionTrace one = make_trace({{0.0, false, true, 0.0, 0}});

    Monitor f(parse_property("F<=9 p").formula, one.schema);
    f.feed(one.samples[0]);
    CHECK_FALSE(f.conclusive());
    f.finish();
    CHECK(f.verdict() == Verdict::False);  // no witness on the finite trace

    Monitor g(parse_property("G<=9 q").formula, one.schema);
    g.feed(one.samples[0]);
    g.finish();
    CHECK(g.verdict() == Verdict::True);  // never violated

    Monitor u(parse_property("q U<=9 p").formula, one.schema);
    u.feed(one.samples[0]);
    u.finish();
    CHECK(u.verdict() == Verdict::False);
}

TEST_CASE("step-bounded operators count samples") {
    ExecutionTrace trace = make_trace({{0.0, false, false, 0.0, 0},
                                       {0.25, false, false, 0.0, 1},
                                       {0.5, true, false, 0.0, 2}});
    CHECK(monitor_verdict(parse_property("F#2 p").formula, trace) == Verdict::True);
    CHECK(monitor_verdict(parse_property("F#1 p").formula, trace) == Verdict::False);
    CHECK(monitor_verdict(parse_property("G#1 !p").formula, trace) == Verdict::True);
    CHECK(monitor_verdict(parse_property("G#2 !p").formula, trace) == Verdict::False);

    // F#1 is decided at the second sample no matter what comes later
    Monitor m(parse_property("F#1 p").formula, trace.schema);
    m.feed(trace.samples[0]);
    CHECK_FALSE(m.conclusive());
    m.feed(trace.samples[1]);
    CHECK(m.conclusive());
    CHECK(m.verdict() == Verdict::False);
}

TEST_CASE("monitor agrees with the offline evaluator on random pairs") {
    std::mt19937 gen(515151);
    int conclusive_before_finish = 0;
    for (int i = 0; i < 10000; ++i) {
        FormulaPtr f = testtraces::random_formula(gen, 4);
        ExecutionTrace trace = testtraces::random_trace(gen, 10);

        const bool expected = evaluate(f, trace, 0);
        Monitor m(f, trace.schema);
        for (const TimedSample& s : trace.samples) {
            if (m.conclusive()) break;
            m.feed(s);
        }
        if (m.conclusive()) ++conclusive_before_finish;
        m.finish();
        const Verdict got = m.verdict();
        REQUIRE(got != Verdict::Undecided);
        if ((got == Verdict::True) != expected) {
            CAPTURE(print(f));
            CAPTURE(trace.length());
            REQUIRE((got == Verdict::True) == expected);
        }
    }
    CHECK(conclusive_before_finish > 1000);  // early stopping actually happens
}

TEST_CASE("eventually and globally match their until forms") {
    std::mt19937 gen(626262);
    for (int i = 0; i < 10000; ++i) {
        FormulaPtr f = testtraces::random_formula(gen, 4);
        FormulaPtr u = testtraces::to_until_form(f);
        ExecutionTrace trace = testtraces::random_trace(gen, 10);
        CHECK(evaluate(f, trace, 0) == evaluate(u, trace, 0));
        CHECK(monitor_verdict(f, trace) == monitor_verdict(u, trace));
    }
}

TEST_CASE("verdicts latch once conclusive") {
    ExecutionTrace trace = make_trace({{0.0, true, false, 0.0, 0},
                                       {1.0, false, false, 0.0, 0},
                                       {2.0, false, false, 0.0, 0}});
    Monitor m(parse_property("F<=5 p").formula, trace.schema);
    m.feed(trace.samples[0]);
    REQUIRE(m.verdict() == Verdict::True);
    m.feed(trace.samples[1]);  // ignored: already decided
    m.feed(trace.samples[2]);
    m.finish();
    CHECK(m.verdict() == Verdict::True);
    CHECK(m.samples_fed() == 1);
}

TEST_CASE("feeding beyond the total bound matches finishing at the bound") {
    std::mt19937 gen(737373);
    for (int i = 0; i < 2000; ++i) {
        FormulaPtr f = testtraces::random_formula(gen, 3);
        if (has_step_bound(f)) continue;  // time-bounded budgets only
        ExecutionTrace trace = testtraces::random_trace(gen, 10);
        const double budget = total_time_bound(f, 0.0);

        Monitor in_budget(f, trace.schema);
        std::size_t k = 0;
        for (; k < trace.length() && trace.time(k) <= budget; ++k) {
            in_budget.feed(trace.samples[k]);
        }
        in_budget.finish();

        Monitor full(f, trace.schema);
        for (const TimedSample& s : trace.samples) full.feed(s);
        full.finish();

        CHECK(full.verdict() == in_budget.verdict());
    }
}

TEST_CASE("time-bounded monitors are conclusive once the budget is strictly passed") {
    std::mt19937 gen(848484);
    for (int i = 0; i < 2000; ++i) {
        FormulaPtr f = testtraces::random_formula(gen, 3);
        if (has_step_bound(f)) continue;
        ExecutionTrace trace = testtraces::random_trace(gen, 10);
        const double budget = total_time_bound(f, 0.0);
        Monitor m(f, trace.schema);
        bool fed_past = false;
        for (const TimedSample& s : trace.samples) {
            if (m.conclusive()) break;
            m.feed(s);
            if (s.time > budget) fed_past = true;
        }
        if (fed_past) CHECK(m.conclusive());
    }
}

TEST_CASE("binding rejects kind mismatches up front") {
    auto schema = testtraces::pqxn_schema();
    CHECK_THROWS_AS(Monitor(parse_property("x").formula, schema), EvalError);      // bare Real
    CHECK_THROWS_AS(Monitor(parse_property("n").formula, schema), EvalError);      // bare Int
    CHECK_THROWS_AS(Monitor(parse_property("p > 0").formula, schema), EvalError);  // compared Bool
    CHECK_THROWS_AS(Monitor(parse_property("missing").formula, schema), EvalError);
    CHECK_NOTHROW(Monitor(parse_property("p & x > 0").formula, schema));
}

TEST_CASE("feeds must move forward in time") {
    ExecutionTrace trace = make_trace({{0.0, false, false, 0.0, 0}});
    Monitor m(parse_property("F<=100 p").formula, trace.schema);
    m.feed(1.0, trace.samples[0].values);
    CHECK_THROWS_AS(m.feed(0.5, trace.samples[0].values), EvalError);
    CHECK_NOTHROW(m.feed(1.0, trace.samples[0].values));  // equal times are fine
    CHECK_THROWS_AS(m.feed(std::numeric_limits<double>::infinity(), trace.samples[0].values),
                    EvalError);
}

TEST_CASE("finish without samples is an error") {
    auto schema = testtraces::pqxn_schema();
    Monitor m(parse_property("F<=1 p").formula, schema);
    CHECK_THROWS_AS(m.finish(), EvalError);
}

TEST_CASE("monitor_trace convenience matches the manual loop") {
    std::mt19937 gen(959595);
    for (int i = 0; i < 500; ++i) {
        FormulaPtr f = testtraces::random_formula(gen, 3);
        ExecutionTrace trace = testtraces::random_trace(gen, 8);
        CHECK(monitor_trace(f, trace) == monitor_verdict(f, trace));
    }
}
