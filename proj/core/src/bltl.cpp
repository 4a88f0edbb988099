#include "pnsmc/bltl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "pnsmc/errors.hpp"

namespace pnsmc {

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Ge: return ">=";
        case CompareOp::Gt: return ">";
    }
    return "?";
}

Bound Bound::time_bound(double t) {
    if (!std::isfinite(t) || t <= 0.0) {
        throw std::invalid_argument("time bound must be finite and > 0");
    }
    Bound b;
    b.kind = Kind::Time;
    b.time = t;
    return b;
}

Bound Bound::step_bound(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("step bound must be >= 1");
    Bound b;
    b.kind = Kind::Steps;
    b.steps = n;
    return b;
}

FormulaPtr Formula::make_true() {
    static const FormulaPtr t{new Formula(FormulaKind::True, {}, nullptr, nullptr, {})};
    return t;
}

FormulaPtr Formula::make_false() {
    static const FormulaPtr f{new Formula(FormulaKind::False, {}, nullptr, nullptr, {})};
    return f;
}

FormulaPtr Formula::make_atom(Atom a) {
    if (a.name.empty()) throw std::invalid_argument("atom needs a variable name");
    return FormulaPtr(new Formula(FormulaKind::Atom, std::move(a), nullptr, nullptr, {}));
}

FormulaPtr Formula::variable(std::string name) {
    Atom a;
    a.name = std::move(name);
    return make_atom(std::move(a));
}

FormulaPtr Formula::compare(std::string name, CompareOp op, double constant) {
    Atom a;
    a.name = std::move(name);
    a.op = op;
    a.constant = constant;
    a.integer_constant = std::nearbyint(constant) == constant && std::isfinite(constant) &&
                         std::abs(constant) < 9.0e15;
    return make_atom(std::move(a));
}

FormulaPtr Formula::negation(FormulaPtr f) {
    return FormulaPtr(new Formula(FormulaKind::Not, {}, std::move(f), nullptr, {}));
}

FormulaPtr Formula::conjunction(FormulaPtr l, FormulaPtr r) {
    return FormulaPtr(new Formula(FormulaKind::And, {}, std::move(l), std::move(r), {}));
}

FormulaPtr Formula::disjunction(FormulaPtr l, FormulaPtr r) {
    return FormulaPtr(new Formula(FormulaKind::Or, {}, std::move(l), std::move(r), {}));
}

FormulaPtr Formula::implication(FormulaPtr l, FormulaPtr r) {
    return FormulaPtr(new Formula(FormulaKind::Implies, {}, std::move(l), std::move(r), {}));
}

FormulaPtr Formula::until(FormulaPtr l, FormulaPtr r, Bound b) {
    return FormulaPtr(new Formula(FormulaKind::Until, {}, std::move(l), std::move(r), b));
}

FormulaPtr Formula::eventually(FormulaPtr f, Bound b) {
    return FormulaPtr(new Formula(FormulaKind::Eventually, {}, std::move(f), nullptr, b));
}

FormulaPtr Formula::globally(FormulaPtr f, Bound b) {
    return FormulaPtr(new Formula(FormulaKind::Globally, {}, std::move(f), nullptr, b));
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return true;
        case FormulaKind::Atom: {
            const Atom& x = a->atom();
            const Atom& y = b->atom();
            return x.name == y.name && x.op == y.op &&
                   (!x.op || (x.constant == y.constant && x.integer_constant == y.integer_constant));
        }
        case FormulaKind::Not:
            return equal(a->lhs(), b->lhs());
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
            return equal(a->lhs(), b->lhs()) && equal(a->rhs(), b->rhs());
        case FormulaKind::Until:
        case FormulaKind::Eventually:
        case FormulaKind::Globally: {
            const Bound& x = a->bound();
            const Bound& y = b->bound();
            if (x.kind != y.kind) return false;
            if (x.kind == Bound::Kind::Time ? (x.time != y.time) : (x.steps != y.steps)) return false;
            return equal(a->lhs(), b->lhs()) &&
                   (a->kind() != FormulaKind::Until || equal(a->rhs(), b->rhs()));
        }
    }
    return false;
}

namespace {

std::string format_number(double v, bool integer_constant) {
    if (integer_constant) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string print_bound(const Bound& b) {
    if (b.kind == Bound::Kind::Time) {
        return "<=" + format_number(b.time, std::nearbyint(b.time) == b.time &&
                                                std::abs(b.time) < 9.0e15);
    }
    return "#" + std::to_string(b.steps);
}

// Precedence levels: -> 0, | 1, & 2, U 3, prefix ops 4, primary 5.
int precedence(FormulaKind k) {
    switch (k) {
        case FormulaKind::Implies: return 0;
        case FormulaKind::Or: return 1;
        case FormulaKind::And: return 2;
        case FormulaKind::Until: return 3;
        case FormulaKind::Not:
        case FormulaKind::Eventually:
        case FormulaKind::Globally: return 4;
        default: return 5;
    }
}

void print_rec(const FormulaPtr& f, int min_prec, std::string& out) {
    int prec = precedence(f->kind());
    bool parens = prec < min_prec;
    if (parens) out += '(';
    switch (f->kind()) {
        case FormulaKind::True:
            out += "true";
            break;
        case FormulaKind::False:
            out += "false";
            break;
        case FormulaKind::Atom: {
            const Atom& a = f->atom();
            out += a.name;
            if (a.op) {
                out += ' ';
                out += to_string(*a.op);
                out += ' ';
                out += format_number(a.constant, a.integer_constant);
            }
            break;
        }
        case FormulaKind::Not:
            out += '!';
            print_rec(f->lhs(), 4, out);
            break;
        case FormulaKind::And:
            print_rec(f->lhs(), 2, out);
            out += " & ";
            print_rec(f->rhs(), 3, out);
            break;
        case FormulaKind::Or:
            print_rec(f->lhs(), 1, out);
            out += " | ";
            print_rec(f->rhs(), 2, out);
            break;
        case FormulaKind::Implies:
            print_rec(f->lhs(), 1, out);
            out += " -> ";
            print_rec(f->rhs(), 0, out);
            break;
        case FormulaKind::Until:
            print_rec(f->lhs(), 4, out);
            out += " U";
            out += print_bound(f->bound());
            out += ' ';
            print_rec(f->rhs(), 3, out);
            break;
        case FormulaKind::Eventually:
        case FormulaKind::Globally:
            out += f->kind() == FormulaKind::Eventually ? 'F' : 'G';
            out += print_bound(f->bound());
            out += ' ';
            print_rec(f->lhs(), 4, out);
            break;
    }
    if (parens) out += ')';
}

}  // namespace

std::string print(const FormulaPtr& f) {
    std::string out;
    print_rec(f, 0, out);
    return out;
}

namespace {

enum class Tok {
    End, LParen, RParen, Not, And, Or, Implies, KwTrue, KwFalse, KwF, KwG, KwU,
    Ident, Number, Hash, Lt, Le, Eq, Ne, Ge, Gt
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    bool integer = false;
    int line = 1, column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }
    Token take() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        throw ParseError(at.line, at.column, message);
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            bump();
        }
        current_ = Token{};
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= src_.size()) {
            current_.kind = Tok::End;
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                bump();
            }
            current_.text = std::string(src_.substr(start, pos_ - start));
            if (current_.text == "true") current_.kind = Tok::KwTrue;
            else if (current_.text == "false") current_.kind = Tok::KwFalse;
            else if (current_.text == "F") current_.kind = Tok::KwF;
            else if (current_.text == "G") current_.kind = Tok::KwG;
            else if (current_.text == "U") current_.kind = Tok::KwU;
            else current_.kind = Tok::Ident;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
            (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '>' &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) || src_[pos_ + 1] == '.'))) {
            lex_number();
            return;
        }
        switch (c) {
            case '(': bump(); current_.kind = Tok::LParen; return;
            case ')': bump(); current_.kind = Tok::RParen; return;
            case '&': bump(); current_.kind = Tok::And; return;
            case '|': bump(); current_.kind = Tok::Or; return;
            case '#': bump(); current_.kind = Tok::Hash; return;
            case '=': bump(); current_.kind = Tok::Eq; return;
            case '!':
                bump();
                if (pos_ < src_.size() && src_[pos_] == '=') {
                    bump();
                    current_.kind = Tok::Ne;
                } else {
                    current_.kind = Tok::Not;
                }
                return;
            case '<':
                bump();
                if (pos_ < src_.size() && src_[pos_] == '=') {
                    bump();
                    current_.kind = Tok::Le;
                } else {
                    current_.kind = Tok::Lt;
                }
                return;
            case '>':
                bump();
                if (pos_ < src_.size() && src_[pos_] == '=') {
                    bump();
                    current_.kind = Tok::Ge;
                } else {
                    current_.kind = Tok::Gt;
                }
                return;
            case '-':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                    bump();
                    bump();
                    current_.kind = Tok::Implies;
                    return;
                }
                break;
            default:
                break;
        }
        throw ParseError(line_, column_, std::string("unknown operator '") + c + "'");
    }

    void lex_number() {
        std::size_t start = pos_;
        bool integer = true;
        if (src_[pos_] == '-') bump();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            integer = false;
            bump();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            integer = false;
            bump();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) bump();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
        }
        std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), value);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
            throw ParseError(current_.line, current_.column,
                             "malformed number '" + std::string(text) + "'");
        }
        current_.kind = Tok::Number;
        current_.number = value;
        current_.integer = integer;
        current_.text = std::string(text);
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1, column_ = 1;
    Token current_;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) {}

    FormulaPtr parse() {
        FormulaPtr f = parse_implies();
        const Token& t = lex_.peek();
        if (t.kind != Tok::End) {
            lex_.fail(t, "unexpected trailing input" +
                             (t.text.empty() ? std::string() : " '" + t.text + "'"));
        }
        return f;
    }

private:
    FormulaPtr parse_implies() {
        FormulaPtr l = parse_or();
        if (lex_.peek().kind == Tok::Implies) {
            lex_.take();
            return Formula::implication(std::move(l), parse_implies());
        }
        return l;
    }

    FormulaPtr parse_or() {
        FormulaPtr l = parse_and();
        while (lex_.peek().kind == Tok::Or) {
            lex_.take();
            l = Formula::disjunction(std::move(l), parse_and());
        }
        return l;
    }

    FormulaPtr parse_and() {
        FormulaPtr l = parse_until();
        while (lex_.peek().kind == Tok::And) {
            lex_.take();
            l = Formula::conjunction(std::move(l), parse_until());
        }
        return l;
    }

    FormulaPtr parse_until() {
        FormulaPtr l = parse_unary();
        if (lex_.peek().kind == Tok::KwU) {
            Token u = lex_.take();
            Bound b = parse_bound(u);
            return Formula::until(std::move(l), parse_until(), b);
        }
        return l;
    }

    FormulaPtr parse_unary() {
        const Token& t = lex_.peek();
        switch (t.kind) {
            case Tok::Not:
                lex_.take();
                return Formula::negation(parse_unary());
            case Tok::KwF: {
                Token op = lex_.take();
                Bound b = parse_bound(op);
                return Formula::eventually(parse_unary(), b);
            }
            case Tok::KwG: {
                Token op = lex_.take();
                Bound b = parse_bound(op);
                return Formula::globally(parse_unary(), b);
            }
            default:
                return parse_primary();
        }
    }

    FormulaPtr parse_primary() {
        Token t = lex_.take();
        switch (t.kind) {
            case Tok::KwTrue:
                return Formula::make_true();
            case Tok::KwFalse:
                return Formula::make_false();
            case Tok::LParen: {
                FormulaPtr f = parse_implies();
                Token close = lex_.take();
                if (close.kind != Tok::RParen) lex_.fail(close, "expected ')'");
                return f;
            }
            case Tok::Ident:
                return parse_atom(std::move(t));
            default:
                lex_.fail(t, "expected a formula" +
                                 (t.text.empty() ? std::string() : ", found '" + t.text + "'"));
        }
    }

    FormulaPtr parse_atom(Token ident) {
        std::optional<CompareOp> op;
        switch (lex_.peek().kind) {
            case Tok::Lt: op = CompareOp::Lt; break;
            case Tok::Le: op = CompareOp::Le; break;
            case Tok::Eq: op = CompareOp::Eq; break;
            case Tok::Ne: op = CompareOp::Ne; break;
            case Tok::Ge: op = CompareOp::Ge; break;
            case Tok::Gt: op = CompareOp::Gt; break;
            default: break;
        }
        Atom a;
        a.name = std::move(ident.text);
        if (op) {
            lex_.take();
            Token num = lex_.take();
            if (num.kind != Tok::Number) lex_.fail(num, "expected a numeric constant");
            a.op = op;
            a.constant = num.number;
            a.integer_constant = num.integer;
        }
        return Formula::make_atom(std::move(a));
    }

    Bound parse_bound(const Token& op) {
        Token t = lex_.take();
        if (t.kind == Tok::Le) {
            Token num = lex_.take();
            if (num.kind != Tok::Number) lex_.fail(num, "expected a time bound after '<='");
            if (!(num.number > 0.0) || !std::isfinite(num.number)) {
                lex_.fail(num, "time bound must be > 0");
            }
            return Bound::time_bound(num.number);
        }
        if (t.kind == Tok::Hash) {
            Token num = lex_.take();
            if (num.kind != Tok::Number || !num.integer) {
                lex_.fail(num, "expected an integer step bound after '#'");
            }
            if (num.number < 1.0) lex_.fail(num, "step bound must be >= 1");
            return Bound::step_bound(static_cast<std::int64_t>(num.number));
        }
        lex_.fail(t, "operator '" + op.text + "' needs a bound: '<= t' or '# n'");
    }

    Lexer lex_;
};

void bound_kinds(const FormulaPtr& f, bool& has_time, bool& has_steps) {
    if (!f) return;
    switch (f->kind()) {
        case FormulaKind::Until:
        case FormulaKind::Eventually:
        case FormulaKind::Globally:
            (f->bound().kind == Bound::Kind::Time ? has_time : has_steps) = true;
            break;
        default:
            break;
    }
    bound_kinds(f->lhs(), has_time, has_steps);
    bound_kinds(f->rhs(), has_time, has_steps);
}

}  // namespace

ParseResult parse_property(std::string_view text) {
    ParseResult result;
    result.formula = Parser(text).parse();
    bool has_time = false, has_steps = false;
    bound_kinds(result.formula, has_time, has_steps);
    if (has_time && has_steps) {
        result.warnings.push_back(
            "property mixes time bounds (<=) and step bounds (#); "
            "step bounds count samples, not elapsed time");
    }
    return result;
}

FormulaPtr resolve(const FormulaPtr& f, const PropositionTable& propositions) {
    if (!f) return f;
    switch (f->kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return f;
        case FormulaKind::Atom: {
            const Atom& a = f->atom();
            if (!a.op) {
                auto it = propositions.find(a.name);
                if (it != propositions.end()) return it->second;
            }
            return f;
        }
        case FormulaKind::Not:
            return Formula::negation(resolve(f->lhs(), propositions));
        case FormulaKind::And:
            return Formula::conjunction(resolve(f->lhs(), propositions),
                                        resolve(f->rhs(), propositions));
        case FormulaKind::Or:
            return Formula::disjunction(resolve(f->lhs(), propositions),
                                        resolve(f->rhs(), propositions));
        case FormulaKind::Implies:
            return Formula::implication(resolve(f->lhs(), propositions),
                                        resolve(f->rhs(), propositions));
        case FormulaKind::Until:
            return Formula::until(resolve(f->lhs(), propositions), resolve(f->rhs(), propositions),
                                  f->bound());
        case FormulaKind::Eventually:
            return Formula::eventually(resolve(f->lhs(), propositions), f->bound());
        case FormulaKind::Globally:
            return Formula::globally(resolve(f->lhs(), propositions), f->bound());
    }
    return f;
}

double total_time_bound(const FormulaPtr& f, double tick_dt) {
    if (!f) return 0.0;
    switch (f->kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Atom:
            return 0.0;
        case FormulaKind::Not:
            return total_time_bound(f->lhs(), tick_dt);
        case FormulaKind::And:
        case FormulaKind::Or:
        case FormulaKind::Implies:
            return std::max(total_time_bound(f->lhs(), tick_dt),
                            total_time_bound(f->rhs(), tick_dt));
        case FormulaKind::Until:
        case FormulaKind::Eventually:
        case FormulaKind::Globally: {
            const Bound& b = f->bound();
            double own = b.kind == Bound::Kind::Time ? b.time
                                                     : static_cast<double>(b.steps) * tick_dt;
            return own + std::max(total_time_bound(f->lhs(), tick_dt),
                                  total_time_bound(f->rhs(), tick_dt));
        }
    }
    return 0.0;
}

bool has_step_bound(const FormulaPtr& f) {
    bool has_time = false, has_steps = false;
    bound_kinds(f, has_time, has_steps);
    return has_steps;
}

namespace {

bool eval_atom(const Atom& a, const ObservedState& s) {
    const ObservedValue& v = s.at(a.name);
    if (!a.op) {
        if (!std::holds_alternative<bool>(v)) {
            throw EvalError("variable '" + a.name + "' is not Boolean, cannot use it as a bare atom");
        }
        return std::get<bool>(v);
    }
    double x = as_real(v);  // throws EvalError for Bool variables
    switch (*a.op) {
        case CompareOp::Lt: return x < a.constant;
        case CompareOp::Le: return x <= a.constant;
        case CompareOp::Eq: return x == a.constant;
        case CompareOp::Ne: return x != a.constant;
        case CompareOp::Ge: return x >= a.constant;
        case CompareOp::Gt: return x > a.constant;
    }
    return false;
}

bool within_bound(const Bound& b, const ExecutionTrace& trace, std::size_t k, std::size_t i) {
    if (b.kind == Bound::Kind::Steps) return static_cast<std::int64_t>(i) <= b.steps;
    return trace.time(k + i) - trace.time(k) <= b.time;
}

}  // namespace

bool evaluate(const FormulaPtr& f, const ExecutionTrace& trace, std::size_t k) {
    if (k >= trace.length()) {
        throw std::out_of_range("suffix start " + std::to_string(k) + " out of range for trace of " +
                                std::to_string(trace.length()) + " samples");
    }
    switch (f->kind()) {
        case FormulaKind::True:
            return true;
        case FormulaKind::False:
            return false;
        case FormulaKind::Atom:
            return eval_atom(f->atom(), trace.state(k));
        case FormulaKind::Not:
            return !evaluate(f->lhs(), trace, k);
        case FormulaKind::And:
            return evaluate(f->lhs(), trace, k) && evaluate(f->rhs(), trace, k);
        case FormulaKind::Or:
            return evaluate(f->lhs(), trace, k) || evaluate(f->rhs(), trace, k);
        case FormulaKind::Implies:
            return !evaluate(f->lhs(), trace, k) || evaluate(f->rhs(), trace, k);
        case FormulaKind::Until:
            for (std::size_t i = 0; k + i < trace.length() && within_bound(f->bound(), trace, k, i);
                 ++i) {
                if (evaluate(f->rhs(), trace, k + i)) return true;
                if (!evaluate(f->lhs(), trace, k + i)) return false;
            }
            return false;
        case FormulaKind::Eventually:
            for (std::size_t i = 0; k + i < trace.length() && within_bound(f->bound(), trace, k, i);
                 ++i) {
                if (evaluate(f->lhs(), trace, k + i)) return true;
            }
            return false;
        case FormulaKind::Globally:
            for (std::size_t i = 0; k + i < trace.length() && within_bound(f->bound(), trace, k, i);
                 ++i) {
                if (!evaluate(f->lhs(), trace, k + i)) return false;
            }
            return true;
    }
    return false;
}

}  // namespace pnsmc
