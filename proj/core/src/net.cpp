#include "pnsmc/net.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "pnsmc/errors.hpp"

namespace pnsmc {

TokenKind kind_of(const TokenValue& v) {
    return std::holds_alternative<bool>(v) ? TokenKind::Bool : TokenKind::Int;
}

std::string to_string(const TokenValue& v) {
    if (std::holds_alternative<bool>(v)) return as_bool(v) ? "true" : "false";
    return std::to_string(as_int(v));
}

const TokenValue& Marking::token(std::uint32_t place, std::size_t index) const {
    const Tokens& t = slots_[place];
    if (index >= t.size()) {
        throw std::out_of_range("token index " + std::to_string(index) + " out of range for place " +
                                std::to_string(place) + " holding " + std::to_string(t.size()) +
                                " token(s)");
    }
    return t[index];
}

void Marking::remove(std::uint32_t place, std::size_t index) {
    Tokens& t = slots_[place];
    if (index >= t.size()) {
        throw std::out_of_range("token index " + std::to_string(index) + " out of range for place " +
                                std::to_string(place));
    }
    t.erase(t.begin() + static_cast<std::ptrdiff_t>(index));
}

void Marking::set(std::uint32_t place, std::size_t index, TokenValue v) {
    Tokens& t = slots_[place];
    if (index >= t.size()) {
        throw std::out_of_range("token index " + std::to_string(index) + " out of range for place " +
                                std::to_string(place));
    }
    t[index] = v;
}

std::optional<std::uint32_t> Net::place_id(std::string_view name) const {
    for (const Place& p : places) {
        if (p.name == name) return p.id;
    }
    return std::nullopt;
}

std::optional<std::uint32_t> Net::rule_id(std::string_view name) const {
    for (std::uint32_t i = 0; i < rules.size(); ++i) {
        if (rules[i].name == name) return i;
    }
    return std::nullopt;
}

EnabledSet select(const Net& net, const Marking& marking) {
    EnabledSet out;
    for (std::uint32_t i = 0; i < net.rules.size(); ++i) {
        const Rule& r = net.rules[i];
        if (!r.guard(marking)) continue;
        double rate = r.rate(marking);
        if (!std::isfinite(rate) || rate <= 0.0) {
            throw ModelError("rule '" + r.name + "' is enabled with non-positive rate " +
                             std::to_string(rate));
        }
        out.ids.push_back(i);
        out.rates.push_back(rate);
        out.total_rate += rate;
    }
    return out;
}

std::uint32_t solve_conflicts(const EnabledSet& enabled, RandomStream& stream) {
    if (enabled.empty()) throw ModelError("no enabled rule to select from");
    std::size_t k = stream.discrete(std::span<const double>(enabled.rates.data(), enabled.rates.size()));
    return enabled.ids[k];
}

double sample_sojourn(const EnabledSet& enabled, RandomStream& stream) {
    if (enabled.empty()) throw ModelError("no enabled rule, sojourn time is undefined");
    return stream.exponential(enabled.total_rate);
}

Marking apply_rule(const Net& net, const Marking& marking, std::uint32_t rule) {
    const Rule& r = net.rules.at(rule);
    if (!r.guard(marking)) {
        throw ModelError("guard violation: rule '" + r.name + "' applied while disabled");
    }
    Marking next = r.effect(marking);
    std::vector<std::string> issues = check_marking(net, next);
    if (!issues.empty()) {
        throw ModelError("corrupt effect of rule '" + r.name + "': " + issues.front());
    }
    return next;
}

std::optional<StepResult> step(const Net& net, const Marking& marking, double now,
                               RandomStream& stream) {
    EnabledSet enabled = select(net, marking);
    if (enabled.empty()) return std::nullopt;
    double dt = sample_sojourn(enabled, stream);
    std::uint32_t winner = solve_conflicts(enabled, stream);
    return StepResult{apply_rule(net, marking, winner), now + dt, winner};
}

std::vector<std::string> check_marking(const Net& net, const Marking& marking) {
    std::vector<std::string> issues;
    if (marking.places() != net.places.size()) {
        issues.push_back("marking covers " + std::to_string(marking.places()) + " places, net has " +
                         std::to_string(net.places.size()));
        return issues;
    }
    for (const Place& p : net.places) {
        std::size_t n = marking.count(p.id);
        if (n > static_cast<std::size_t>(p.capacity)) {
            issues.push_back("place '" + p.name + "' holds " + std::to_string(n) +
                             " tokens, capacity is " + std::to_string(p.capacity));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (kind_of(marking.token(p.id, i)) != p.kind) {
                issues.push_back("place '" + p.name + "' holds a token of the wrong kind");
                break;
            }
        }
    }
    return issues;
}

std::vector<std::string> validate_net(const Net& net) {
    std::vector<std::string> issues;
    std::unordered_set<std::string> names;
    for (std::size_t i = 0; i < net.places.size(); ++i) {
        const Place& p = net.places[i];
        if (p.id != i) {
            issues.push_back("place '" + p.name + "' has id " + std::to_string(p.id) +
                             ", expected dense id " + std::to_string(i));
        }
        if (!names.insert(p.name).second) {
            issues.push_back("duplicate place name '" + p.name + "'");
        }
        if (p.capacity < 1) {
            issues.push_back("place '" + p.name + "' has capacity " + std::to_string(p.capacity) +
                             ", must be >= 1");
        }
    }
    names.clear();
    for (const Rule& r : net.rules) {
        if (!names.insert(r.name).second) {
            issues.push_back("duplicate rule name '" + r.name + "'");
        }
        if (!r.guard) issues.push_back("rule '" + r.name + "' has no guard");
        if (!r.rate) issues.push_back("rule '" + r.name + "' has no rate function");
        if (!r.effect) issues.push_back("rule '" + r.name + "' has no effect");
    }
    for (std::string& s : check_marking(net, net.initial)) {
        issues.push_back("initial marking: " + s);
    }
    return issues;
}

}  // namespace pnsmc
