#include "pnsmc/netfile.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "pnsmc/bltl.hpp"
#include "pnsmc/errors.hpp"

namespace pnsmc {

namespace {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        tokens.push_back(Token{line.substr(start, i - start), start + 1});
    }
    return tokens;
}

struct Requirement {
    enum class Kind { NonEmpty, Empty, Compare };
    Kind kind = Kind::NonEmpty;
    std::uint32_t place = 0;
    CompareOp op = CompareOp::Eq;
    TokenValue value;
};

struct Action {
    enum class Kind { Consume, Produce, Set };
    Kind kind = Kind::Consume;
    std::uint32_t place = 0;
    std::int64_t count = 1;  // consume only
    TokenValue value;
};

struct RuleDraft {
    std::string name;
    double rate = 0.0;
    std::size_t line = 0;
    std::vector<Requirement> requirements;
    std::vector<Action> actions;
};

bool compare_int(std::int64_t a, CompareOp op, std::int64_t b) {
    switch (op) {
        case CompareOp::Lt: return a < b;
        case CompareOp::Le: return a <= b;
        case CompareOp::Eq: return a == b;
        case CompareOp::Ne: return a != b;
        case CompareOp::Ge: return a >= b;
        case CompareOp::Gt: return a > b;
    }
    return false;
}

class NetFileParser {
public:
    explicit NetFileParser(std::string_view text) : text_(text) {}

    LoadedModel parse() {
        std::size_t pos = 0;
        std::size_t line_no = 0;
        while (pos <= text_.size()) {
            std::size_t eol = text_.find('\n', pos);
            if (eol == std::string_view::npos) eol = text_.size();
            ++line_no;
            parse_line(text_.substr(pos, eol - pos), line_no);
            if (eol == text_.size()) break;
            pos = eol + 1;
        }
        flush_rule();
        if (net_.places.empty()) throw ParseError(line_no, 1, "net defines no places");
        finish_initial_marking();
        Observer observer = make_observer();  // before the net is moved out
        return LoadedModel{std::move(net_), std::move(observer)};
    }

private:
    [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& message) {
        throw ParseError(line, column, message);
    }

    std::uint32_t require_place(const Token& t, std::size_t line) {
        auto it = place_ids_.find(std::string(t.text));
        if (it == place_ids_.end()) {
            fail(line, t.column, "unknown place '" + std::string(t.text) + "'");
        }
        return it->second;
    }

    TokenValue parse_value(const Token& t, TokenKind kind, std::size_t line) {
        if (kind == TokenKind::Bool) {
            if (t.text == "true") return true;
            if (t.text == "false") return false;
            fail(line, t.column, "expected true or false, got '" + std::string(t.text) + "'");
        }
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) {
            fail(line, t.column, "expected an integer, got '" + std::string(t.text) + "'");
        }
        return v;
    }

    std::int64_t parse_int(const Token& t, std::size_t line) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) {
            fail(line, t.column, "expected an integer, got '" + std::string(t.text) + "'");
        }
        return v;
    }

    double parse_real(const Token& t, std::size_t line) {
        try {
            std::size_t used = 0;
            std::string s(t.text);
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            fail(line, t.column, "expected a number, got '" + std::string(t.text) + "'");
        }
    }

    std::optional<CompareOp> parse_op(std::string_view s) {
        if (s == "<") return CompareOp::Lt;
        if (s == "<=") return CompareOp::Le;
        if (s == "=") return CompareOp::Eq;
        if (s == "!=") return CompareOp::Ne;
        if (s == ">=") return CompareOp::Ge;
        if (s == ">") return CompareOp::Gt;
        return std::nullopt;
    }

    void parse_line(std::string_view line, std::size_t line_no) {
        auto tokens = tokenize(line);
        if (tokens.empty()) return;
        const std::string_view head = tokens[0].text;
        if (head == "place") {
            parse_place(tokens, line_no);
        } else if (head == "rule") {
            parse_rule_header(tokens, line_no);
        } else if (head == "require" || head == "consume" || head == "produce" || head == "set") {
            if (!rule_) {
                fail(line_no, tokens[0].column,
                     "'" + std::string(head) + "' must appear inside a rule");
            }
            parse_rule_body(tokens, line_no);
        } else {
            fail(line_no, tokens[0].column, "unknown directive '" + std::string(head) + "'");
        }
    }

    void parse_place(const std::vector<Token>& t, std::size_t line) {
        flush_rule();
        if (t.size() < 3) fail(line, 1, "usage: place <name> <int|bool> [cap <n>] [init <v>...]");
        std::string name(t[1].text);
        if (place_ids_.count(name)) {
            fail(line, t[1].column, "duplicate place '" + name + "'");
        }
        TokenKind kind;
        if (t[2].text == "int") {
            kind = TokenKind::Int;
        } else if (t[2].text == "bool") {
            kind = TokenKind::Bool;
        } else {
            fail(line, t[2].column, "place kind must be int or bool");
        }
        Place place;
        place.id = static_cast<std::uint32_t>(net_.places.size());
        place.name = name;
        place.kind = kind;
        std::vector<TokenValue> init;
        std::size_t i = 3;
        if (i < t.size() && t[i].text == "cap") {
            if (i + 1 >= t.size()) fail(line, t[i].column, "cap needs a value");
            place.capacity = parse_int(t[i + 1], line);
            if (place.capacity < 1) fail(line, t[i + 1].column, "capacity must be >= 1");
            i += 2;
        }
        if (i < t.size()) {
            if (t[i].text != "init") {
                fail(line, t[i].column, "expected cap or init, got '" + std::string(t[i].text) + "'");
            }
            for (++i; i < t.size(); ++i) init.push_back(parse_value(t[i], kind, line));
        }
        if (static_cast<std::int64_t>(init.size()) > place.capacity) {
            fail(line, 1, "place '" + name + "' holds more initial tokens than its capacity");
        }
        place_ids_.emplace(name, place.id);
        place_kinds_.push_back(kind);
        initial_tokens_.push_back(std::move(init));
        net_.places.push_back(std::move(place));
    }

    void parse_rule_header(const std::vector<Token>& t, std::size_t line) {
        flush_rule();
        if (t.size() != 4 || t[2].text != "rate") {
            fail(line, 1, "usage: rule <name> rate <r>");
        }
        RuleDraft draft;
        draft.name = std::string(t[1].text);
        draft.rate = parse_real(t[3], line);
        draft.line = line;
        if (!(draft.rate > 0.0) || !std::isfinite(draft.rate)) {
            fail(line, t[3].column, "rule rate must be finite and > 0");
        }
        rule_ = std::move(draft);
    }

    void parse_rule_body(const std::vector<Token>& t, std::size_t line) {
        const std::string_view head = t[0].text;
        if (head == "require") {
            if (t.size() < 2) fail(line, 1, "usage: require <place> [empty | <op> <value>]");
            Requirement r;
            r.place = require_place(t[1], line);
            if (t.size() == 2) {
                r.kind = Requirement::Kind::NonEmpty;
            } else if (t.size() == 3 && t[2].text == "empty") {
                r.kind = Requirement::Kind::Empty;
            } else if (t.size() == 4) {
                auto op = parse_op(t[2].text);
                if (!op) fail(line, t[2].column, "unknown comparison '" + std::string(t[2].text) + "'");
                const TokenKind kind = place_kinds_[r.place];
                if (kind == TokenKind::Bool && *op != CompareOp::Eq && *op != CompareOp::Ne) {
                    fail(line, t[2].column, "boolean places support only = and !=");
                }
                r.kind = Requirement::Kind::Compare;
                r.op = *op;
                r.value = parse_value(t[3], kind, line);
            } else {
                fail(line, 1, "usage: require <place> [empty | <op> <value>]");
            }
            rule_->requirements.push_back(r);
        } else if (head == "consume") {
            if (t.size() < 2 || t.size() > 3) fail(line, 1, "usage: consume <place> [<n>]");
            Action a;
            a.kind = Action::Kind::Consume;
            a.place = require_place(t[1], line);
            if (t.size() == 3) {
                a.count = parse_int(t[2], line);
                if (a.count < 1) fail(line, t[2].column, "consume count must be >= 1");
            }
            rule_->actions.push_back(a);
        } else if (head == "produce") {
            if (t.size() != 3) fail(line, 1, "usage: produce <place> <value>");
            Action a;
            a.kind = Action::Kind::Produce;
            a.place = require_place(t[1], line);
            a.value = parse_value(t[2], place_kinds_[a.place], line);
            rule_->actions.push_back(a);
        } else {  // set
            if (t.size() != 3) fail(line, 1, "usage: set <place> <value>");
            Action a;
            a.kind = Action::Kind::Set;
            a.place = require_place(t[1], line);
            a.value = parse_value(t[2], place_kinds_[a.place], line);
            rule_->actions.push_back(a);
        }
    }

    void flush_rule() {
        if (!rule_) return;
        RuleDraft draft = std::move(*rule_);
        rule_.reset();
        for (const Rule& existing : net_.rules) {
            if (existing.name == draft.name) {
                fail(draft.line, 1, "duplicate rule '" + draft.name + "'");
            }
        }

        // Net token change per place, for the capacity part of the guard.
        std::map<std::uint32_t, std::pair<std::int64_t, std::int64_t>> deltas;  // consumed, produced
        for (const Action& a : draft.actions) {
            if (a.kind == Action::Kind::Consume) {
                deltas[a.place].first += a.count;
            } else if (a.kind == Action::Kind::Produce) {
                deltas[a.place].second += 1;
            }
        }
        struct CapacityCheck {
            std::uint32_t place;
            std::int64_t consumed;
            std::int64_t produced;
            std::int64_t capacity;
        };
        std::vector<CapacityCheck> checks;
        for (const auto& [place, cp] : deltas) {
            checks.push_back({place, cp.first, cp.second, net_.places[place].capacity});
        }
        // `set` needs a token to overwrite.
        std::vector<Requirement> requirements = draft.requirements;
        for (const Action& a : draft.actions) {
            if (a.kind == Action::Kind::Set) {
                Requirement r;
                r.kind = Requirement::Kind::NonEmpty;
                r.place = a.place;
                requirements.push_back(r);
            }
        }

        Rule rule;
        rule.name = std::move(draft.name);
        const double rate = draft.rate;
        rule.rate = [rate](const Marking&) { return rate; };
        rule.guard = [requirements, checks](const Marking& m) {
            for (const Requirement& r : requirements) {
                switch (r.kind) {
                    case Requirement::Kind::NonEmpty:
                        if (m.empty(r.place)) return false;
                        break;
                    case Requirement::Kind::Empty:
                        if (!m.empty(r.place)) return false;
                        break;
                    case Requirement::Kind::Compare: {
                        if (m.empty(r.place)) return false;
                        const TokenValue& v = m.front(r.place);
                        if (std::holds_alternative<bool>(v)) {
                            const bool eq = std::get<bool>(v) == std::get<bool>(r.value);
                            if ((r.op == CompareOp::Eq) != eq) return false;
                        } else if (!compare_int(std::get<std::int64_t>(v), r.op,
                                                std::get<std::int64_t>(r.value))) {
                            return false;
                        }
                        break;
                    }
                }
            }
            for (const CapacityCheck& c : checks) {
                const auto count = static_cast<std::int64_t>(m.count(c.place));
                if (count < c.consumed) return false;
                if (count - c.consumed + c.produced > c.capacity) return false;
            }
            return true;
        };
        const std::vector<Action> actions = std::move(draft.actions);
        rule.effect = [actions](const Marking& m) {
            Marking out = m;
            for (const Action& a : actions) {
                switch (a.kind) {
                    case Action::Kind::Consume:
                        for (std::int64_t i = 0; i < a.count; ++i) out.remove(a.place, 0);
                        break;
                    case Action::Kind::Produce:
                        out.push(a.place, a.value);
                        break;
                    case Action::Kind::Set:
                        out.set(a.place, 0, a.value);
                        break;
                }
            }
            return out;
        };
        net_.rules.push_back(std::move(rule));
    }

    void finish_initial_marking() {
        net_.initial = Marking(net_.places.size());
        for (std::size_t p = 0; p < initial_tokens_.size(); ++p) {
            for (const TokenValue& v : initial_tokens_[p]) {
                net_.initial.push(static_cast<std::uint32_t>(p), v);
            }
        }
    }

    Observer make_observer() const {
        std::vector<DerivedVariable> variables;
        for (const Place& place : net_.places) {
            const std::uint32_t id = place.id;
            if (place.kind == TokenKind::Int) {
                variables.push_back({place.name, ValueKind::Int, [id](const Marking& m) {
                                         return ObservedValue(m.empty(id) ? std::int64_t{0}
                                                                          : m.front_int(id));
                                     }});
            } else {
                variables.push_back({place.name, ValueKind::Bool, [id](const Marking& m) {
                                         return ObservedValue(m.empty(id) ? false
                                                                          : m.front_bool(id));
                                     }});
            }
        }
        return Observer(std::move(variables), {});
    }

    std::string_view text_;
    Net net_;
    std::map<std::string, std::uint32_t, std::less<>> place_ids_;
    std::vector<TokenKind> place_kinds_;
    std::vector<std::vector<TokenValue>> initial_tokens_;
    std::optional<RuleDraft> rule_;
};

}  // namespace

LoadedModel parse_net_text(std::string_view text) { return NetFileParser(text).parse(); }

LoadedModel load_net_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, 0, "cannot open net file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_net_text(buffer.str());
}

}  // namespace pnsmc
