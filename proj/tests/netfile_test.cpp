#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>
#include <string>

#include "pnsmc/bltl.hpp"
#include "pnsmc/config.hpp"
#include "pnsmc/controlsys.hpp"
#include "pnsmc/errors.hpp"
#include "pnsmc/netfile.hpp"
#include "pnsmc/smc.hpp"

using namespace pnsmc;

namespace {

const char* kRaceNet = R"(# a two-rule race for one token
place start int init 1
place won_a int
place won_b int

rule a rate 1.0
  consume start
  produce won_a 1

rule b rate 3.0
  consume start
  produce won_b 1
)";

}  // namespace

TEST_CASE("a race net parses into places, rules, and an initial marking") {
    LoadedModel model = parse_net_text(kRaceNet);
    CHECK(validate_net(model.net).empty());
    REQUIRE(model.net.places.size() == 3);
    REQUIRE(model.net.rules.size() == 2);
    CHECK(model.net.places[0].name == "start");
    CHECK(model.net.initial.count(0) == 1);
    CHECK(model.net.initial.front_int(0) == 1);
    CHECK(model.net.initial.empty(1));

    // one observed variable per place
    CHECK(model.observer.schema()->names ==
          std::vector<std::string>{"start", "won_a", "won_b"});

    // the parsed net behaves like the race it describes
    FormulaPtr f = parse_property("F<=1000 won_a >= 1").formula;
    RunOptions o;
    o.seed = 6;
    auto r = estimate_probability(model.net, model.observer, TemporalResolution::any_firing(), f,
                                  FixedRuns{4000}, o);
    CHECK(r.estimate == doctest::Approx(0.25).epsilon(0.09));
}

TEST_CASE("capacity limits show up in the guard, not as errors") {
    LoadedModel model = parse_net_text(
        "place buf int cap 2 init 0\n"
        "rule put rate 1.0\n"
        "  produce buf 7\n");
    // initially one token: put is enabled twice, then the place is full
    Marking m = model.net.initial;
    CHECK(model.net.rules[0].guard(m));
    m = apply_rule(model.net, m, 0);
    CHECK_FALSE(model.net.rules[0].guard(m));  // 2 tokens, capacity 2
    CHECK(select(model.net, m).empty());       // absorbing, not broken
}

TEST_CASE("consume requires enough tokens") {
    LoadedModel model = parse_net_text(
        "place pool int cap 5 init 1 1 1\n"
        "place out int cap 5\n"
        "rule take2 rate 1.0\n"
        "  consume pool 2\n"
        "  produce out 0\n");
    Marking m = model.net.initial;
    CHECK(model.net.rules[0].guard(m));   // 3 tokens >= 2
    m = apply_rule(model.net, m, 0);
    CHECK(m.count(0) == 1);
    CHECK(m.count(1) == 1);
    CHECK_FALSE(model.net.rules[0].guard(m));  // 1 token < 2
}

TEST_CASE("require clauses compare against the front token") {
    LoadedModel model = parse_net_text(
        "place gate bool init false\n"
        "place n int init 4\n"
        "rule open rate 1.0\n"
        "  require gate = false\n"
        "  require n >= 4\n"
        "  set gate true\n"
        "rule spin rate 1.0\n"
        "  require gate = true\n"
        "  require n empty\n"
        "  set n 9\n");
    const Net& net = model.net;
    CHECK(net.rules[0].guard(net.initial));
    CHECK_FALSE(net.rules[1].guard(net.initial));  // gate false and n nonempty

    Marking opened = apply_rule(net, net.initial, 0);
    CHECK(opened.front_bool(0));
    CHECK_FALSE(net.rules[0].guard(opened));
}

TEST_CASE("set requires a token to overwrite") {
    LoadedModel model = parse_net_text(
        "place slot int\n"
        "rule write rate 1.0\n"
        "  set slot 3\n");
    CHECK_FALSE(model.net.rules[0].guard(model.net.initial));  // slot is empty
}

TEST_CASE("parse errors carry the offending line") {
    auto line_of = [](const char* text) {
        try {
            parse_net_text(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("") > 0);                                      // no places at all
    CHECK(line_of("place p int\nplace p int\n") == 2);           // duplicate place
    CHECK(line_of("place p xyz\n") == 1);                        // bad kind
    CHECK(line_of("place p int cap 0\n") == 1);                  // capacity < 1
    CHECK(line_of("place p int init 1 2\n") == 1);               // over capacity
    CHECK(line_of("place p int\nrule r rate -2\n") == 2);        // bad rate
    CHECK(line_of("place p int\nrule r\n") == 2);                // missing rate
    CHECK(line_of("place p int\nrule r rate 1\n  consume q\n") == 3);  // unknown place
    CHECK(line_of("place p int\n  consume p\n") == 2);           // body outside a rule
    CHECK(line_of("place p bool\nrule r rate 1\n  require p < true\n") == 3);
    CHECK(line_of("place p int\nrule r rate 1\nrule r rate 1\n") >= 2);  // duplicate rule
    CHECK(line_of("frobnicate\n") == 1);                         // unknown directive
    CHECK(line_of("place p bool init 2\n") == 1);                // bool wants true/false
}

TEST_CASE("comments and blank lines are ignored") {
    LoadedModel model = parse_net_text(
        "# header\n"
        "\n"
        "place p int init 3   # trailing comment\n"
        "\n"
        "rule r rate 0.5  # fires forever\n"
        "  set p 3\n");
    CHECK(model.net.places.size() == 1);
    CHECK(model.net.rules.size() == 1);
    CHECK(model.net.initial.front_int(0) == 3);
}

TEST_CASE("load_net_file reports missing files") {
    CHECK_THROWS_AS(load_net_file("/nonexistent/net.txt"), ParseError);
}

TEST_CASE("config text parses typed values") {
    Config c = parse_config_text(
        "# overrides\n"
        "sensor_groups = 10\n"
        "cycle_time = 2.5\n"
        "flag = true\n"
        "name = hello world\n");
    CHECK(c.get_int("sensor_groups", 0) == 10);
    CHECK(c.get_real("cycle_time", 0.0) == 2.5);
    CHECK(c.get_real("sensor_groups", 0.0) == 10.0);  // ints read as reals too
    CHECK(c.get_bool("flag", false) == true);
    CHECK(c.get("name") == "hello world");
    CHECK_FALSE(c.get("missing").has_value());
    CHECK(c.get_int("missing", 42) == 42);  // absent keys fall back
    CHECK(c.empty() == false);
    CHECK(Config{}.empty());

    CHECK_THROWS_AS(c.get_int("name", 0), std::invalid_argument);
    CHECK_THROWS_AS(c.get_bool("cycle_time", false), std::invalid_argument);
}

TEST_CASE("config syntax errors carry line numbers") {
    try {
        parse_config_text("a = 1\nnot a pair\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("system parameters apply from config by field name") {
    Config c = parse_config_text(
        "sensor_groups = 20\n"
        "sensor_quorum = 15\n"
        "cycle_time = 4\n"
        "sensor_mttf = 1000\n");
    SystemParams p = apply_system_params(c, SystemParams{});
    CHECK(p.sensor_groups == 20);
    CHECK(p.sensor_quorum == 15);
    CHECK(p.cycle_time == 4.0);
    CHECK(p.sensor_mttf == 1000.0);
    CHECK(p.actuator_groups == 30);  // untouched fields keep their defaults

    Config unknown = parse_config_text("definitely_not_a_parameter = 1\n");
    CHECK_THROWS_AS(apply_system_params(unknown, SystemParams{}), std::invalid_argument);

    // the resulting parameters build a working model
    ControlSystem cs = build_control_system(apply_system_params(c, SystemParams{}));
    CHECK(cs.net.place_id("sensor_group_20").has_value());
    CHECK_FALSE(cs.net.place_id("sensor_group_21").has_value());
}
