#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "pnsmc/random.hpp"

namespace pnsmc {

/// Token payload carried in a place: a signed integer or a boolean.
using TokenValue = std::variant<std::int64_t, bool>;

enum class TokenKind { Int, Bool };

TokenKind kind_of(const TokenValue& v);
std::string to_string(const TokenValue& v);

inline std::int64_t as_int(const TokenValue& v) { return std::get<std::int64_t>(v); }
inline bool as_bool(const TokenValue& v) { return std::get<bool>(v); }

struct Place {
    std::uint32_t id = 0;  // dense index into the net's place list
    std::string name;
    TokenKind kind = TokenKind::Int;
    std::int64_t capacity = 1;  // maximum token count, >= 1
};

/// Token assignment for every place of a net. Tokens of one place form an
/// ordered sequence addressed by index. The marking itself is a plain
/// container; capacity and kind constraints are checked against a Net by
/// check_marking and by apply_rule after each effect.
class Marking {
public:
    Marking() = default;
    explicit Marking(std::size_t places) : slots_(places) {}

    std::size_t places() const { return slots_.size(); }
    std::size_t count(std::uint32_t place) const { return slots_[place].size(); }
    bool empty(std::uint32_t place) const { return slots_[place].empty(); }

    const TokenValue& token(std::uint32_t place, std::size_t index) const;
    void push(std::uint32_t place, TokenValue v) { slots_[place].push_back(v); }
    void remove(std::uint32_t place, std::size_t index);
    void set(std::uint32_t place, std::size_t index, TokenValue v);

    /// First token of a single-token place; throws std::out_of_range if empty.
    const TokenValue& front(std::uint32_t place) const { return token(place, 0); }
    std::int64_t front_int(std::uint32_t place) const { return as_int(front(place)); }
    bool front_bool(std::uint32_t place) const { return as_bool(front(place)); }

    bool operator==(const Marking& other) const { return slots_ == other.slots_; }

private:
    // Inline storage for two tokens covers the common capacity-1 case and
    // keeps a whole-marking copy allocation-free.
    using Tokens = boost::container::small_vector<TokenValue, 2>;
    std::vector<Tokens> slots_;
};

/// Transition rule in executable form. The guard decides enabledness, the
/// rate gives the exponential firing rate for the current marking (must be
/// positive whenever the guard holds), and the effect maps the marking to
/// the post-firing marking.
struct Rule {
    std::string name;
    std::function<bool(const Marking&)> guard;
    std::function<double(const Marking&)> rate;
    std::function<Marking(const Marking&)> effect;
};

/// Immutable net: places, rules, and the initial marking. Shared freely
/// across threads; all engine operations are pure functions of their inputs.
struct Net {
    std::vector<Place> places;
    std::vector<Rule> rules;
    Marking initial;

    std::optional<std::uint32_t> place_id(std::string_view name) const;
    std::optional<std::uint32_t> rule_id(std::string_view name) const;
};

/// Rules enabled in a marking, with their rates and the total exit rate.
struct EnabledSet {
    boost::container::small_vector<std::uint32_t, 96> ids;
    boost::container::small_vector<double, 96> rates;
    double total_rate = 0.0;

    bool empty() const { return ids.empty(); }
    std::size_t size() const { return ids.size(); }
};

struct StepResult {
    Marking marking;
    double time;         // absolute time of the firing
    std::uint32_t rule;  // id of the fired rule
};

/// Evaluates every guard and collects the enabled rules with their current
/// rates. Throws ModelError if an enabled rule reports a non-positive or
/// non-finite rate.
EnabledSet select(const Net& net, const Marking& marking);

/// Picks the winning rule of the race, each with probability rate/total.
/// Consumes one uniform draw. Throws ModelError if no rule is enabled.
std::uint32_t solve_conflicts(const EnabledSet& enabled, RandomStream& stream);

/// Sojourn time of the current marking: Exp(total rate) via one uniform
/// draw. Throws ModelError if no rule is enabled.
double sample_sojourn(const EnabledSet& enabled, RandomStream& stream);

/// Applies one rule's effect. Throws ModelError if the guard does not hold
/// (guard violation) or if the resulting marking breaks a capacity or token
/// kind constraint (corrupt effect).
Marking apply_rule(const Net& net, const Marking& marking, std::uint32_t rule);

/// One race step: samples the sojourn time first, then the winner, then
/// applies the winner's effect. Returns nothing if the marking is absorbing
/// (no rule enabled). Exactly two uniform draws are consumed per step.
std::optional<StepResult> step(const Net& net, const Marking& marking, double now,
                               RandomStream& stream);

/// Diagnostics for a malformed net: duplicate place/rule names, non-dense
/// place ids, missing guard/rate/effect functions, capacity < 1, and an
/// initial marking that breaks place count, capacity, or kind constraints.
/// An empty result means the net is well formed.
std::vector<std::string> validate_net(const Net& net);

/// Capacity/kind diagnostics for a marking against a net, empty if valid.
std::vector<std::string> check_marking(const Net& net, const Marking& marking);

}  // namespace pnsmc
