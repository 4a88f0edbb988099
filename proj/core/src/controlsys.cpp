#include "pnsmc/controlsys.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace pnsmc {

std::vector<std::string> validate_params(const SystemParams& p) {
    std::vector<std::string> problems;
    auto at_least_one = [&](std::int64_t v, const char* name) {
        if (v < 1) problems.push_back(std::string(name) + " must be >= 1");
    };
    at_least_one(p.sensor_groups, "sensor_groups");
    at_least_one(p.sensors_per_group, "sensors_per_group");
    at_least_one(p.sensor_quorum, "sensor_quorum");
    at_least_one(p.sensors_per_group_quorum, "sensors_per_group_quorum");
    at_least_one(p.actuator_groups, "actuator_groups");
    at_least_one(p.actuators_per_group, "actuators_per_group");
    at_least_one(p.actuator_quorum, "actuator_quorum");
    at_least_one(p.actuators_per_group_quorum, "actuators_per_group_quorum");
    if (p.skip_limit < 0) problems.push_back("skip_limit must be >= 0");
    if (p.sensor_quorum > p.sensor_groups) {
        problems.push_back("sensor_quorum cannot exceed sensor_groups");
    }
    if (p.sensors_per_group_quorum > p.sensors_per_group) {
        problems.push_back("sensors_per_group_quorum cannot exceed sensors_per_group");
    }
    if (p.actuator_quorum > p.actuator_groups) {
        problems.push_back("actuator_quorum cannot exceed actuator_groups");
    }
    if (p.actuators_per_group_quorum > p.actuators_per_group) {
        problems.push_back("actuators_per_group_quorum cannot exceed actuators_per_group");
    }
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0)) problems.push_back(std::string(name) + " must be > 0");
    };
    positive(p.sensor_mttf, "sensor_mttf");
    positive(p.actuator_mttf, "actuator_mttf");
    positive(p.transient_mttf, "transient_mttf");
    positive(p.processor_mttf, "processor_mttf");
    positive(p.cycle_time, "cycle_time");
    positive(p.reboot_mean, "reboot_mean");
    return problems;
}

PropositionTable failure_propositions(const SystemParams& p) {
    using F = Formula;
    PropositionTable table;
    table["failure_1"] = F::conjunction(
        F::compare("number_sensors", CompareOp::Lt, static_cast<double>(p.sensor_quorum)),
        F::compare("proci_status", CompareOp::Eq, 2.0));
    table["failure_2"] = F::conjunction(
        F::compare("number_actuators", CompareOp::Lt, static_cast<double>(p.actuator_quorum)),
        F::compare("proco_status", CompareOp::Eq, 2.0));
    table["failure_3"] =
        F::compare("timeout_counts", CompareOp::Gt, static_cast<double>(p.skip_limit));
    table["failure_4"] = F::compare("procm_status", CompareOp::Eq, 0.0);
    table["shutdown"] =
        F::disjunction(F::disjunction(table["failure_1"], table["failure_2"]),
                       F::disjunction(table["failure_3"], table["failure_4"]));
    return table;
}

namespace {

constexpr std::uint32_t kNoCounter = UINT32_MAX;

struct PlaceIds {
    std::vector<std::uint32_t> sensor_groups;
    std::vector<std::uint32_t> actuator_groups;
    std::uint32_t proci = 0;
    std::uint32_t proco = 0;
    std::uint32_t procm = 0;
    std::uint32_t timeout = 0;
    std::uint32_t flag = 0;
    std::uint32_t reboots_in = 0;
    std::uint32_t reboots_out = 0;
    std::uint32_t cycles = 0;
};

std::int64_t functional_groups(const Marking& m, const std::vector<std::uint32_t>& groups,
                               std::int64_t quorum) {
    std::int64_t n = 0;
    for (std::uint32_t p : groups) n += m.front_int(p) >= quorum ? 1 : 0;
    return n;
}

Marking with_int(const Marking& m, std::uint32_t place, std::int64_t value) {
    Marking out = m;
    out.set(place, 0, value);
    return out;
}

}  // namespace

ControlSystem build_control_system(const SystemParams& params) {
    {
        auto problems = validate_params(params);
        if (!problems.empty()) {
            std::string msg = "invalid system parameters:";
            for (const std::string& p : problems) msg += " " + p + ";";
            msg.pop_back();
            throw std::invalid_argument(msg);
        }
    }

    Net net;
    PlaceIds ids;
    std::vector<TokenValue> init_tokens;
    auto add_place = [&](std::string name, TokenKind kind, TokenValue init) {
        Place place;
        place.id = static_cast<std::uint32_t>(net.places.size());
        place.name = std::move(name);
        place.kind = kind;
        place.capacity = 1;
        net.places.push_back(std::move(place));
        init_tokens.push_back(init);
        return static_cast<std::uint32_t>(net.places.size() - 1);
    };

    for (std::int64_t i = 1; i <= params.sensor_groups; ++i) {
        ids.sensor_groups.push_back(add_place("sensor_group_" + std::to_string(i), TokenKind::Int,
                                              params.sensors_per_group));
    }
    for (std::int64_t i = 1; i <= params.actuator_groups; ++i) {
        ids.actuator_groups.push_back(add_place("actuator_group_" + std::to_string(i),
                                                TokenKind::Int, params.actuators_per_group));
    }
    ids.proci = add_place("proci_status", TokenKind::Int, std::int64_t{2});
    ids.proco = add_place("proco_status", TokenKind::Int, std::int64_t{2});
    ids.procm = add_place("procm_status", TokenKind::Int, std::int64_t{2});
    ids.timeout = add_place("timeout_counts", TokenKind::Int, std::int64_t{0});
    ids.flag = add_place("shutdown_flag", TokenKind::Bool, false);
    ids.reboots_in = add_place("reboots_input", TokenKind::Int, std::int64_t{0});
    ids.reboots_out = add_place("reboots_output", TokenKind::Int, std::int64_t{0});
    ids.cycles = add_place("cycle_timer", TokenKind::Int, std::int64_t{0});

    net.initial = Marking(net.places.size());
    for (std::size_t i = 0; i < init_tokens.size(); ++i) {
        net.initial.push(static_cast<std::uint32_t>(i), init_tokens[i]);
    }

    const std::uint32_t flag = ids.flag;

    // Per-group unit failures: each functional unit fails independently, so
    // the group rate scales with the number of still-functional units.
    auto add_group_rules = [&](const std::vector<std::uint32_t>& groups, const char* prefix,
                               double mttf) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const std::uint32_t place = groups[g];
            Rule rule;
            rule.name = std::string(prefix) + "_" + std::to_string(g + 1);
            rule.guard = [flag, place](const Marking& m) {
                return !m.front_bool(flag) && m.front_int(place) > 0;
            };
            rule.rate = [place, mttf](const Marking& m) {
                return static_cast<double>(m.front_int(place)) / mttf;
            };
            rule.effect = [place](const Marking& m) {
                return with_int(m, place, m.front_int(place) - 1);
            };
            net.rules.push_back(std::move(rule));
        }
    };
    add_group_rules(ids.sensor_groups, "sensor_fail", params.sensor_mttf);
    add_group_rules(ids.actuator_groups, "actuator_fail", params.actuator_mttf);

    // Processor status rules: fire when the place holds exactly `from`
    // (or, for permanent I/O faults, any still-alive status in `also_from`),
    // move it to `to`, and optionally bump a reboot counter.
    auto add_status_rule = [&](std::string name, std::uint32_t place, std::int64_t from,
                               std::optional<std::int64_t> also_from, std::int64_t to, double mean,
                               std::uint32_t counter) {
        Rule rule;
        rule.name = std::move(name);
        rule.guard = [flag, place, from, also_from](const Marking& m) {
            if (m.front_bool(flag)) return false;
            const std::int64_t s = m.front_int(place);
            return s == from || (also_from && s == *also_from);
        };
        const double rate = 1.0 / mean;
        rule.rate = [rate](const Marking&) { return rate; };
        rule.effect = [place, to, counter](const Marking& m) {
            Marking out = with_int(m, place, to);
            if (counter != kNoCounter) out.set(counter, 0, m.front_int(counter) + 1);
            return out;
        };
        net.rules.push_back(std::move(rule));
    };

    // Transient faults knock a functional I/O processor into the rebooting
    // state; a reboot restores it and counts; a permanent fault can strike
    // a functional or a rebooting processor. The main processor has no
    // transient faults and never reboots.
    add_status_rule("transient_input", ids.proci, 2, {}, 1, params.transient_mttf, kNoCounter);
    add_status_rule("transient_output", ids.proco, 2, {}, 1, params.transient_mttf, kNoCounter);
    add_status_rule("permanent_input", ids.proci, 2, 1, 0, params.processor_mttf, kNoCounter);
    add_status_rule("permanent_output", ids.proco, 2, 1, 0, params.processor_mttf, kNoCounter);
    add_status_rule("permanent_main", ids.procm, 2, {}, 0, params.processor_mttf, kNoCounter);
    add_status_rule("reboot_input", ids.proci, 1, {}, 2, params.reboot_mean, ids.reboots_in);
    add_status_rule("reboot_output", ids.proco, 1, {}, 2, params.reboot_mean, ids.reboots_out);

    {
        // Cycle tick: advances the cycle counter; a cycle with any I/O
        // processor not functional is skipped and counts toward the limit
        // (saturating one past it); a clean cycle resets the count.
        Rule rule;
        rule.name = "cycle_tick";
        rule.guard = [flag](const Marking& m) { return !m.front_bool(flag); };
        const double rate = 1.0 / params.cycle_time;
        rule.rate = [rate](const Marking&) { return rate; };
        const std::uint32_t proci = ids.proci;
        const std::uint32_t proco = ids.proco;
        const std::uint32_t timeout = ids.timeout;
        const std::uint32_t cycles = ids.cycles;
        const std::int64_t cap = params.skip_limit + 1;
        rule.effect = [proci, proco, timeout, cycles, cap](const Marking& m) {
            Marking out = m;
            out.set(cycles, 0, m.front_int(cycles) + 1);
            const bool clean = m.front_int(proci) == 2 && m.front_int(proco) == 2;
            const std::int64_t next =
                clean ? 0 : std::min<std::int64_t>(m.front_int(timeout) + 1, cap);
            out.set(timeout, 0, next);
            return out;
        };
        net.rules.push_back(std::move(rule));
    }

    {
        // Shutdown: one mean cycle after any failure condition first holds,
        // the flag is set; every other rule's guard requires it clear, so
        // the marking becomes absorbing.
        Rule rule;
        rule.name = "shutdown";
        const PlaceIds captured = ids;
        const SystemParams p = params;
        rule.guard = [captured, p](const Marking& m) {
            if (m.front_bool(captured.flag)) return false;
            if (m.front_int(captured.timeout) > p.skip_limit) return true;    // failure_3
            if (m.front_int(captured.procm) == 0) return true;                // failure_4
            if (m.front_int(captured.proci) == 2 &&                           // failure_1
                functional_groups(m, captured.sensor_groups, p.sensors_per_group_quorum) <
                    p.sensor_quorum) {
                return true;
            }
            return m.front_int(captured.proco) == 2 &&                        // failure_2
                   functional_groups(m, captured.actuator_groups, p.actuators_per_group_quorum) <
                       p.actuator_quorum;
        };
        const double rate = 1.0 / params.cycle_time;
        rule.rate = [rate](const Marking&) { return rate; };
        rule.effect = [flag](const Marking& m) {
            Marking out = m;
            out.set(flag, 0, true);
            return out;
        };
        net.rules.push_back(std::move(rule));
    }

    // Observed variables, in trace-column order. The reward classes address
    // them by index: 0 number_sensors, 1 number_actuators, 2..4 processor
    // statuses, 5 timeout_counts, 6..8 reboot counters, 9 shutdown_flag.
    std::vector<DerivedVariable> variables;
    {
        const PlaceIds captured = ids;
        const SystemParams p = params;
        variables.push_back(
            {"number_sensors", ValueKind::Int, [captured, p](const Marking& m) {
                 return ObservedValue(
                     functional_groups(m, captured.sensor_groups, p.sensors_per_group_quorum));
             }});
        variables.push_back(
            {"number_actuators", ValueKind::Int, [captured, p](const Marking& m) {
                 return ObservedValue(
                     functional_groups(m, captured.actuator_groups, p.actuators_per_group_quorum));
             }});
        auto int_var = [](std::string name, std::uint32_t place) {
            return DerivedVariable{std::move(name), ValueKind::Int, [place](const Marking& m) {
                                       return ObservedValue(m.front_int(place));
                                   }};
        };
        variables.push_back(int_var("proci_status", ids.proci));
        variables.push_back(int_var("proco_status", ids.proco));
        variables.push_back(int_var("procm_status", ids.procm));
        variables.push_back(int_var("timeout_counts", ids.timeout));
        variables.push_back(int_var("reboots_input", ids.reboots_in));
        variables.push_back(int_var("reboots_output", ids.reboots_out));
        const std::uint32_t rin = ids.reboots_in;
        const std::uint32_t rout = ids.reboots_out;
        variables.push_back({"reboots_total", ValueKind::Int, [rin, rout](const Marking& m) {
                                 return ObservedValue(m.front_int(rin) + m.front_int(rout));
                             }});
        variables.push_back({"shutdown_flag", ValueKind::Bool, [flag](const Marking& m) {
                                 return ObservedValue(m.front_bool(flag));
                             }});
    }

    // Reward classes: up (everything functional, nothing pending), shutdown
    // (flag set), danger (anything else). Exactly one holds in any state.
    std::vector<RewardClass> classes;
    {
        enum : std::size_t {
            kSensors = 0,
            kActuators = 1,
            kProci = 2,
            kProco = 3,
            kProcm = 4,
            kTimeout = 5,
            kFlag = 9
        };
        const std::int64_t all_sensors = params.sensor_groups;
        const std::int64_t all_actuators = params.actuator_groups;
        auto fully_up = [all_sensors, all_actuators](const ObservedState& s) {
            return std::get<std::int64_t>(s.at(kSensors)) == all_sensors &&
                   std::get<std::int64_t>(s.at(kActuators)) == all_actuators &&
                   std::get<std::int64_t>(s.at(kProci)) == 2 &&
                   std::get<std::int64_t>(s.at(kProco)) == 2 &&
                   std::get<std::int64_t>(s.at(kProcm)) == 2 &&
                   std::get<std::int64_t>(s.at(kTimeout)) == 0;
        };
        classes.push_back({"up", [fully_up](const ObservedState& s) {
                               return !std::get<bool>(s.at(kFlag)) && fully_up(s);
                           }});
        classes.push_back({"danger", [fully_up](const ObservedState& s) {
                               return !std::get<bool>(s.at(kFlag)) && !fully_up(s);
                           }});
        classes.push_back({"shutdown", [](const ObservedState& s) {
                               return std::get<bool>(s.at(kFlag));
                           }});
    }

    ControlSystem system;
    system.params = params;
    system.net = std::move(net);
    system.observer = Observer(std::move(variables), std::move(classes));
    system.propositions = failure_propositions(params);
    return system;
}

}  // namespace pnsmc
