#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pnsmc/bltl.hpp"
#include "pnsmc/net.hpp"
#include "pnsmc/trace.hpp"

namespace pnsmc {

/// Parameters of the built-in embedded control system model. Time is
/// measured in model time units of 30 seconds: a day is 2880, a month
/// (30 days) 86400, a year (360 days) 1036800.
struct SystemParams {
    std::int64_t sensor_groups = 50;
    std::int64_t sensors_per_group = 3;
    std::int64_t sensor_quorum = 37;             // functional groups needed
    std::int64_t sensors_per_group_quorum = 2;   // sensors keeping a group functional
    std::int64_t actuator_groups = 30;
    std::int64_t actuators_per_group = 2;
    std::int64_t actuator_quorum = 27;
    std::int64_t actuators_per_group_quorum = 1;
    std::int64_t skip_limit = 4;                 // K: tolerated consecutive skipped cycles

    double sensor_mttf = 86400.0;      // one month per sensor
    double actuator_mttf = 172800.0;   // two months per actuator
    double transient_mttf = 2880.0;    // one day per I/O processor
    double processor_mttf = 1036800.0; // one year per processor (permanent)
    double cycle_time = 2.0;           // one minute
    double reboot_mean = 1.0;          // thirty seconds
};

/// Diagnostics for out-of-range parameters; empty when valid.
std::vector<std::string> validate_params(const SystemParams& params);

/// The executable model: the net, the observer producing the trace
/// variables (number_sensors, number_actuators, proci_status, proco_status,
/// procm_status, timeout_counts, reboots_input, reboots_output,
/// reboots_total, shutdown_flag) and the reward accumulators (reward_up,
/// reward_danger, reward_shutdown), and the named failure propositions
/// (failure_1..failure_4, shutdown) for use in properties.
struct ControlSystem {
    SystemParams params;
    Net net;
    Observer observer;
    PropositionTable propositions;
};

/// Builds the control system model:
///  - one place per sensor group (token = functional sensor count) and per
///    actuator group, status places for the input/output/main processors
///    (2 functional, 1 rebooting, 0 failed; the main processor never
///    reboots), the skipped-cycle counter, reboot counters, a cycle
///    counter, and the shutdown flag that freezes every rule;
///  - failure rules per group scaled by the functional-unit count,
///    transient/permanent processor faults, reboots, the cycle tick that
///    counts consecutive skipped cycles (saturating at skip_limit + 1), and
///    the shutdown rule that sets the flag one mean cycle after any failure
///    condition first holds.
/// Throws std::invalid_argument when validate_params reports problems.
ControlSystem build_control_system(const SystemParams& params = SystemParams{});

/// The named failure conditions over the observed variables:
///   failure_1: sensor quorum lost while the input processor can report it
///   failure_2: actuator quorum lost while the output processor can report it
///   failure_3: skipped-cycle count exceeds the limit
///   failure_4: main processor permanently failed
///   shutdown:  any of the four
PropositionTable failure_propositions(const SystemParams& params);

/// Case-study sampling: one sample per time unit.
inline TemporalResolution default_control_resolution() {
    return TemporalResolution::every(1.0);
}

}  // namespace pnsmc
