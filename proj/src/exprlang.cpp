// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/exprlang.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "jumplab/error.hpp"

namespace jumplab::expr {

namespace {

constexpr int kMaxStack = 32;

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, lbracket, rbracket, bar, comma, end };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
    double number = 0.0;
};

std::string describe(const Token& t)
{
    if (t.kind == Tok::end) return "end of input";
    return "'" + std::string(t.text) + "'";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next()
    {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Tok::end, start, {}};
        const char c = src_[pos_];
        auto single = [&](Tok k) {
            ++pos_;
            return Token{k, start, src_.substr(start, 1)};
        };
        switch (c) {
        case '+': return single(Tok::plus);
        case '-': return single(Tok::minus);
        case '*': return single(Tok::star);
        case '/': return single(Tok::slash);
        case '^': return single(Tok::caret);
        case '(': return single(Tok::lparen);
        case ')': return single(Tok::rparen);
        case '[': return single(Tok::lbracket);
        case ']': return single(Tok::rbracket);
        case '|': return single(Tok::bar);
        case ',': return single(Tok::comma);
        default: break;
        }
        if ((c >= '0' && c <= '9') || c == '.') {
            std::size_t end = pos_;
            while (end < src_.size() && ((src_[end] >= '0' && src_[end] <= '9') || src_[end] == '.')) ++end;
            if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
                std::size_t exp_end = end + 1;
                if (exp_end < src_.size() && (src_[exp_end] == '+' || src_[exp_end] == '-')) ++exp_end;
                if (exp_end < src_.size() && src_[exp_end] >= '0' && src_[exp_end] <= '9') {
                    while (exp_end < src_.size() && src_[exp_end] >= '0' && src_[exp_end] <= '9') ++exp_end;
                    end = exp_end;
                }
            }
            Token t{Tok::number, start, src_.substr(start, end - start)};
            auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, t.number);
            if (ec != std::errc() || ptr != src_.data() + end || !std::isfinite(t.number)) {
                throw SyntaxError(start, {"number"}, "malformed number '" + std::string(t.text) + "'");
            }
            pos_ = end;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) ++end;
            pos_ = end;
            return {Tok::ident, start, src_.substr(start, end - start)};
        }
        throw SyntaxError(start, {}, "unexpected character '" + std::string(1, c) + "'");
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
};

struct FunctionInfo {
    std::string_view name;
    Op op;
    int arity;
};

constexpr std::array<FunctionInfo, 10> kFunctions = {{
    {"exp", Op::exp, 1},
    {"log", Op::log, 1},
    {"sin", Op::sin, 1},
    {"cos", Op::cos, 1},
    {"sqrt", Op::sqrt, 1},
    {"abs", Op::abs, 1},
    {"step", Op::step, 1},
    {"min", Op::min, 2},
    {"max", Op::max, 2},
    {"clamp", Op::clamp, 3},
}};

int arity(Op op)
{
    switch (op) {
    case Op::constant:
    case Op::coord:
    case Op::norm:
    case Op::radius: return 0;
    case Op::neg:
    case Op::exp:
    case Op::log:
    case Op::sin:
    case Op::cos:
    case Op::sqrt:
    case Op::abs:
    case Op::step: return 1;
    case Op::clamp: return 3;
    default: return 2;
    }
}

const std::vector<std::string> kOperandStart = {"number", "identifier", "'('", "'|'", "'-'"};

class Parser {
public:
    Parser(std::string_view src, Domain domain) : lex_(src), domain_(domain) { advance(); }

    std::vector<Node> nodes;

    int parse_all()
    {
        int root = expression();
        if (cur_.kind != Tok::end) {
            throw SyntaxError(cur_.offset, {"operator", "end of input"}, describe(cur_));
        }
        return root;
    }

private:
    void advance() { cur_ = lex_.next(); }

    void expect(Tok kind, const char* what)
    {
        if (cur_.kind != kind) throw SyntaxError(cur_.offset, {what}, describe(cur_));
        advance();
    }

    int add(Node n)
    {
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    }

    int binary(Op op, int a, int b, std::size_t offset)
    {
        Node n;
        n.op = op;
        n.args[0] = a;
        n.args[1] = b;
        n.offset = offset;
        return add(n);
    }

    int expression()
    {
        int lhs = term();
        while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
            const Op op = cur_.kind == Tok::plus ? Op::add : Op::sub;
            const std::size_t off = cur_.offset;
            advance();
            lhs = binary(op, lhs, term(), off);
        }
        return lhs;
    }

    int term()
    {
        int lhs = factor();
        while (cur_.kind == Tok::star || cur_.kind == Tok::slash) {
            const Op op = cur_.kind == Tok::star ? Op::mul : Op::div;
            const std::size_t off = cur_.offset;
            advance();
            lhs = binary(op, lhs, factor(), off);
        }
        return lhs;
    }

    int factor()
    {
        if (cur_.kind == Tok::minus) {
            Node n;
            n.op = Op::neg;
            n.offset = cur_.offset;
            advance();
            n.args[0] = factor();
            return add(n);
        }
        return power();
    }

    int power()
    {
        int base = primary();
        if (cur_.kind == Tok::caret) {
            const std::size_t off = cur_.offset;
            advance();
            return binary(Op::pow, base, factor(), off);
        }
        return base;
    }

    int primary()
    {
        const Token t = cur_;
        switch (t.kind) {
        case Tok::number: {
            advance();
            Node n;
            n.value = t.number;
            n.offset = t.offset;
            return add(n);
        }
        case Tok::lparen: {
            advance();
            int inner = expression();
            expect(Tok::rparen, "')'");
            return inner;
        }
        case Tok::bar: return bars();
        case Tok::ident: return identifier();
        default: throw SyntaxError(t.offset, kOperandStart, describe(t));
        }
    }

    int bars()
    {
        const std::size_t off = cur_.offset;
        advance();
        if (cur_.kind == Tok::ident && cur_.text == "x") {
            // `|x|` is the Euclidean norm of the state; anything else is abs().
            Lexer probe = lex_;
            Token after = probe.next();
            if (after.kind == Tok::bar) {
                if (domain_ != Domain::state) throw UnknownIdentifier(cur_.offset, "x");
                advance();
                advance();
                Node n;
                n.op = Op::norm;
                n.offset = off;
                return add(n);
            }
        }
        int inner = expression();
        expect(Tok::bar, "'|'");
        Node n;
        n.op = Op::abs;
        n.args[0] = inner;
        n.offset = off;
        return add(n);
    }

    int identifier()
    {
        const Token t = cur_;
        advance();
        if (t.text == "x") {
            if (domain_ != Domain::state) throw UnknownIdentifier(t.offset, "x");
            expect(Tok::lbracket, "'['");
            if (cur_.kind != Tok::number || cur_.number != std::floor(cur_.number) || cur_.number < 0 ||
                cur_.number > 64) {
                throw SyntaxError(cur_.offset, {"coordinate index"}, describe(cur_));
            }
            Node n;
            n.op = Op::coord;
            n.index = static_cast<int>(cur_.number);
            n.offset = t.offset;
            advance();
            expect(Tok::rbracket, "']'");
            return add(n);
        }
        if (t.text == "r") {
            if (domain_ != Domain::radial) throw UnknownIdentifier(t.offset, "r");
            Node n;
            n.op = Op::radius;
            n.offset = t.offset;
            return add(n);
        }
        if (t.text == "pi" || t.text == "e") {
            Node n;
            n.value = t.text == "pi" ? std::numbers::pi : std::numbers::e;
            n.offset = t.offset;
            return add(n);
        }
        for (const auto& f : kFunctions) {
            if (f.name != t.text) continue;
            expect(Tok::lparen, "'('");
            Node n;
            n.op = f.op;
            n.offset = t.offset;
            for (int i = 0; i < f.arity; ++i) {
                if (i > 0) expect(Tok::comma, "','");
                n.args[i] = expression();
            }
            if (cur_.kind == Tok::comma) {
                throw SyntaxError(cur_.offset, {"')'"}, "extra argument to " + std::string(f.name));
            }
            expect(Tok::rparen, "')'");
            return add(n);
        }
        throw UnknownIdentifier(t.offset, std::string(t.text));
    }

    Lexer lex_;
    Domain domain_;
    Token cur_{Tok::end, 0, {}};
};

struct Instr {
    Op op;
    double value;
    int index;
    std::size_t offset;
};

std::string format_number(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, ptr);
    return s;
}

std::string_view op_name(Op op)
{
    switch (op) {
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::pow: return "^";
    default: break;
    }
    for (const auto& f : kFunctions)
        if (f.op == op) return f.name;
    return "?";
}

[[noreturn]] void domain_fail(std::string_view what, double v, std::size_t offset)
{
    std::ostringstream os;
    os.precision(17);
    os << what << " (argument " << v << ") at byte " << offset;
    throw DomainError(os.str());
}

}  // namespace

struct Expr::Program {
    std::string source;
    Domain domain = Domain::state;
    std::vector<Node> nodes;
    int root = 0;
    std::vector<Instr> code;
    int max_coord = -1;
    bool has_variables = false;
};

Expr::Expr()
{
    auto p = std::make_shared<Program>();
    p->source = "0";
    p->nodes.push_back(Node{});
    p->code.push_back(Instr{Op::constant, 0.0, 0, 0});
    program_ = std::move(p);
}

Expr::Expr(std::shared_ptr<const Program> program) : program_(std::move(program)) {}

Domain Expr::domain() const noexcept { return program_->domain; }
const std::string& Expr::source() const noexcept { return program_->source; }
const std::vector<Node>& Expr::nodes() const noexcept { return program_->nodes; }
int Expr::root() const noexcept { return program_->root; }
bool Expr::depends_on_variables() const noexcept { return program_->has_variables; }
int Expr::max_coordinate() const noexcept { return program_->max_coord; }

std::optional<double> Expr::constant_value() const
{
    if (program_->has_variables) return std::nullopt;
    return run({}, 0.0);
}

double Expr::eval(std::span<const double> x) const
{
    return run(x, 0.0);
}

double Expr::eval_radial(double r) const
{
    return run({}, r);
}

double Expr::run(std::span<const double> x, double r) const
{
    double stack[kMaxStack];
    int sp = 0;
    for (const Instr& in : program_->code) {
        double v;
        switch (in.op) {
        case Op::constant: stack[sp++] = in.value; continue;
        case Op::coord:
            if (in.index >= static_cast<int>(x.size())) {
                throw IndexError("coordinate x[" + std::to_string(in.index) + "] out of range for dimension " +
                                 std::to_string(x.size()));
            }
            stack[sp++] = x[in.index];
            continue;
        case Op::norm: {
            double s = 0.0;
            for (double c : x) s += c * c;
            stack[sp++] = std::sqrt(s);
            continue;
        }
        case Op::radius: stack[sp++] = r; continue;
        case Op::neg: v = -stack[sp - 1]; break;
        case Op::exp: v = std::exp(stack[sp - 1]); break;
        case Op::log: {
            const double a = stack[sp - 1];
            if (!(a > 0.0)) domain_fail("log of non-positive value", a, in.offset);
            v = std::log(a);
            break;
        }
        case Op::sin: v = std::sin(stack[sp - 1]); break;
        case Op::cos: v = std::cos(stack[sp - 1]); break;
        case Op::sqrt: {
            const double a = stack[sp - 1];
            if (a < 0.0) domain_fail("sqrt of negative value", a, in.offset);
            v = std::sqrt(a);
            break;
        }
        case Op::abs: v = std::fabs(stack[sp - 1]); break;
        case Op::step: v = stack[sp - 1] >= 0.0 ? 1.0 : 0.0; break;
        case Op::add: v = stack[sp - 2] + stack[sp - 1]; --sp; break;
        case Op::sub: v = stack[sp - 2] - stack[sp - 1]; --sp; break;
        case Op::mul: v = stack[sp - 2] * stack[sp - 1]; --sp; break;
        case Op::div: {
            const double b = stack[sp - 1];
            if (b == 0.0) domain_fail("division by zero", b, in.offset);
            v = stack[sp - 2] / b;
            --sp;
            break;
        }
        case Op::pow: {
            const double a = stack[sp - 2];
            const double b = stack[sp - 1];
            if (a < 0.0 && b != std::floor(b)) domain_fail("negative base with fractional exponent", a, in.offset);
            if (a == 0.0 && b < 0.0) domain_fail("zero raised to negative power", b, in.offset);
            v = std::pow(a, b);
            --sp;
            break;
        }
        case Op::min: v = std::fmin(stack[sp - 2], stack[sp - 1]); --sp; break;
        case Op::max: v = std::fmax(stack[sp - 2], stack[sp - 1]); --sp; break;
        case Op::clamp: {
            const double lo = stack[sp - 2];
            const double hi = stack[sp - 1];
            if (lo > hi) domain_fail("clamp with lo > hi", lo, in.offset);
            v = std::fmin(std::fmax(stack[sp - 3], lo), hi);
            sp -= 2;
            break;
        }
        default: v = 0.0; break;
        }
        if (!std::isfinite(v)) domain_fail("non-finite result", v, in.offset);
        stack[sp - 1] = v;
    }
    return stack[0];
}

std::string Expr::to_string() const
{
    const auto& nodes = program_->nodes;
    auto render = [&](auto&& self, int i) -> std::string {
        const Node& n = nodes[i];
        switch (n.op) {
        case Op::constant: return format_number(n.value);
        case Op::coord: return "x[" + std::to_string(n.index) + "]";
        case Op::norm: return "|x|";
        case Op::radius: return "r";
        case Op::neg: return "(-" + self(self, n.args[0]) + ")";
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div:
        case Op::pow:
            return "(" + self(self, n.args[0]) + " " + std::string(op_name(n.op)) + " " + self(self, n.args[1]) + ")";
        default: {
            std::string s(op_name(n.op));
            s += "(";
            for (int k = 0; k < arity(n.op); ++k) {
                if (k) s += ", ";
                s += self(self, n.args[k]);
            }
            return s + ")";
        }
        }
    };
    return render(render, program_->root);
}

bool operator==(const Expr& a, const Expr& b) noexcept
{
    if (a.domain() != b.domain()) return false;
    const auto& na = a.nodes();
    const auto& nb = b.nodes();
    auto same = [&](auto&& self, int i, int j) -> bool {
        const Node& x = na[i];
        const Node& y = nb[j];
        if (x.op != y.op) return false;
        if (x.op == Op::constant) return x.value == y.value;
        if (x.op == Op::coord) return x.index == y.index;
        for (int k = 0; k < arity(x.op); ++k)
            if (!self(self, x.args[k], y.args[k])) return false;
        return true;
    };
    return same(same, a.root(), b.root());
}

Expr parse(std::string_view source, Domain domain)
{
    Parser parser(source, domain);
    const int root = parser.parse_all();

    auto program = std::make_shared<Expr::Program>();
    program->source = std::string(source);
    program->domain = domain;
    program->nodes = std::move(parser.nodes);
    program->root = root;

    // Post-order emission; track stack depth so evaluation never overflows.
    int depth = 0;
    int max_depth = 0;
    auto emit = [&](auto&& self, int i) -> void {
        const Node& n = program->nodes[i];
        const int k = arity(n.op);
        for (int a = 0; a < k; ++a) self(self, n.args[a]);
        program->code.push_back(Instr{n.op, n.value, n.index, n.offset});
        depth += 1 - k;
        max_depth = std::max(max_depth, depth);
        if (n.op == Op::coord) program->max_coord = std::max(program->max_coord, n.index);
        if (n.op == Op::coord || n.op == Op::norm || n.op == Op::radius) program->has_variables = true;
    };
    emit(emit, root);
    if (max_depth > kMaxStack) {
        throw SyntaxError(0, {}, "expression nested too deeply");
    }
    return Expr(std::move(program));
}

RangeReport check_range(const Expr& e, std::span<const Vec> grid, double lo, double hi)
{
    if (grid.empty()) throw DomainError("check_range: empty grid");
    RangeReport rep;
    rep.lo = lo;
    rep.hi = hi;
    bool first = true;
    for (const Vec& x : grid) {
        double v;
        try {
            v = e.eval(x);
        } catch (const DomainError& err) {
            std::ostringstream os;
            os.precision(17);
            os << err.what() << " at grid point (";
            for (int i = 0; i < x.dim(); ++i) os << (i ? ", " : "") << x[i];
            os << ")";
            throw DomainError(os.str());
        }
        if (first || v < rep.min) {
            rep.min = v;
            rep.argmin = x;
        }
        if (first || v > rep.max) {
            rep.max = v;
            rep.argmax = x;
        }
        first = false;
    }
    rep.points = grid.size();
    rep.pass = rep.min >= lo && rep.max <= hi;
    return rep;
}

}  // namespace jumplab::expr
