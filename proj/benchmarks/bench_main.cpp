// Microbenchmarks for the hot paths: one engine race step, one monitor
// progression feed, and end-to-end trace generation of the built-in
// control-system model.

#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "pnsmc/bltl.hpp"
#include "pnsmc/controlsys.hpp"
#include "pnsmc/monitor.hpp"
#include "pnsmc/net.hpp"
#include "pnsmc/trace.hpp"

namespace {

using namespace pnsmc;

void bench_engine_step(benchmark::State& state) {
    ControlSystem cs = build_control_system();
    RandomStream stream(7);
    Marking marking = cs.net.initial;
    double now = 0.0;
    for (auto _ : state) {
        std::optional<StepResult> r = step(cs.net, marking, now, stream);
        if (!r) {  // absorbing: restart the trajectory
            marking = cs.net.initial;
            now = 0.0;
            continue;
        }
        marking = std::move(r->marking);
        now = r->time;
        benchmark::DoNotOptimize(marking);
    }
}
BENCHMARK(bench_engine_step);

void bench_monitor_feed(benchmark::State& state) {
    ControlSystem cs = build_control_system();
    FormulaPtr f = resolve(parse_property("F<=86400 failure_2").formula, cs.propositions);
    const auto& schema = cs.observer.schema();
    std::vector<ObservedValue> values(schema->size());
    cs.observer.observe(cs.net.initial, std::span<ObservedValue>(values.data(), values.size()));
    for (std::size_t c = cs.observer.num_variables(); c < values.size(); ++c) values[c] = 0.0;

    double t = 0.0;
    Monitor monitor(f, schema);
    for (auto _ : state) {
        monitor.feed(t, values);
        t += 1.0;
        if (monitor.conclusive()) {  // bound exhausted: start over
            state.PauseTiming();
            monitor = Monitor(f, schema);
            t = 0.0;
            state.ResumeTiming();
        }
    }
}
BENCHMARK(bench_monitor_feed);

void bench_control_trace_day(benchmark::State& state) {
    ControlSystem cs = build_control_system();
    const TemporalResolution resolution = default_control_resolution();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        RandomStream stream(seed++);
        std::size_t samples = 0;
        simulate(cs.net, cs.observer, resolution, 2880.0, stream,
                 [&](double, std::span<const ObservedValue>) {
                     ++samples;
                     return true;
                 });
        benchmark::DoNotOptimize(samples);
    }
}
BENCHMARK(bench_control_trace_day)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
