#include "jetgeo/expr.hpp"

#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace jetgeo {

struct Expr::Node {
    NodeKind kind;
    double value = 0.0;                 // Constant
    std::string name;                   // Variable / Parameter
    BinaryOp op = BinaryOp::Add;        // Binary
    FuncKind fn = FuncKind::Sin;        // Call
    std::shared_ptr<const Node> a, b;   // children (Unary/Call use a)
};

/// Internal node access for the free builder functions in this file.
struct ExprAccess {
    using Node = Expr::Node;
    static Expr wrap(std::shared_ptr<const Node> n) { return Expr(std::move(n)); }
    static const std::shared_ptr<const Node>& node(const Expr& e) { return e.node_; }
};

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

namespace {

using Node = ExprAccess::Node;

bool is_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// index suffix must be a positive integer without a leading zero
std::optional<int> parse_index(std::string_view s) {
    if (!is_digits(s) || s.front() == '0' || s.size() > 6) return std::nullopt;
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

const char* func_name(FuncKind f) {
    switch (f) {
    case FuncKind::Sin: return "sin";
    case FuncKind::Cos: return "cos";
    case FuncKind::Tan: return "tan";
    case FuncKind::Exp: return "exp";
    case FuncKind::Log: return "log";
    case FuncKind::Sqrt: return "sqrt";
    }
    return "?";
}

std::optional<FuncKind> func_from_name(std::string_view s) {
    if (s == "sin") return FuncKind::Sin;
    if (s == "cos") return FuncKind::Cos;
    if (s == "tan") return FuncKind::Tan;
    if (s == "exp") return FuncKind::Exp;
    if (s == "log") return FuncKind::Log;
    if (s == "sqrt") return FuncKind::Sqrt;
    return std::nullopt;
}

} // namespace

bool is_time_symbol(std::string_view name) { return name == "t"; }

std::optional<int> spatial_index(std::string_view name) {
    if (name.size() < 2 || name[0] != 'x') return std::nullopt;
    return parse_index(name.substr(1));
}

std::optional<int> fiber_index(std::string_view name) {
    if (name.size() < 4 || name.substr(0, 3) != "x1_") return std::nullopt;
    return parse_index(name.substr(3));
}

bool is_variable_name(std::string_view name) {
    return is_time_symbol(name) || fiber_index(name).has_value() ||
           spatial_index(name).has_value();
}

std::string spatial_var(int i) { return "x" + std::to_string(i); }
std::string fiber_var(int i) { return "x1_" + std::to_string(i); }

// ---------------------------------------------------------------------------
// construction and folding

Expr::Expr() : Expr(constant(0.0).node_) {}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = (value == 0.0) ? 0.0 : value;  // normalize -0
    return Expr(std::move(n));
}

Expr Expr::symbol(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = is_variable_name(name) ? NodeKind::Variable : NodeKind::Parameter;
    n->name = std::move(name);
    return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::value() const { assert(is_constant()); return node_->value; }
const std::string& Expr::name() const { return node_->name; }
BinaryOp Expr::op() const { assert(kind() == NodeKind::Binary); return node_->op; }
FuncKind Expr::func() const { assert(kind() == NodeKind::Call); return node_->fn; }
Expr Expr::left() const { return Expr(node_->a); }
Expr Expr::right() const { return Expr(node_->b); }
Expr Expr::operand() const { return Expr(node_->a); }

namespace {

Expr raw_unary(const Expr& a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Unary;
    n->a = ExprAccess::node(a);
    return ExprAccess::wrap(std::move(n));
}

Expr raw_binary(BinaryOp op, const Expr& a, const Expr& b) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->op = op;
    n->a = ExprAccess::node(a);
    n->b = ExprAccess::node(b);
    return ExprAccess::wrap(std::move(n));
}

Expr fold_neg(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.value());
    if (a.kind() == NodeKind::Unary) return a.operand();  // -(-e) = e
    return raw_unary(a);
}

bool fold_const_binary(BinaryOp op, double x, double y, double& out) {
    switch (op) {
    case BinaryOp::Add: out = x + y; break;
    case BinaryOp::Sub: out = x - y; break;
    case BinaryOp::Mul: out = x * y; break;
    case BinaryOp::Div:
        if (y == 0.0) return false;
        out = x / y;
        break;
    case BinaryOp::Pow:
        // fold only powers that are valid real arithmetic
        if (x < 0.0 && y != std::floor(y)) return false;
        if (x == 0.0 && y < 0.0) return false;
        out = std::pow(x, y);
        break;
    }
    return std::isfinite(out);
}

Expr fold_binary(BinaryOp op, const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) {
        double v = 0.0;
        if (fold_const_binary(op, a.value(), b.value(), v)) return Expr::constant(v);
    }
    switch (op) {
    case BinaryOp::Add:
        if (a.is_constant(0.0)) return b;
        if (b.is_constant(0.0)) return a;
        break;
    case BinaryOp::Sub:
        if (b.is_constant(0.0)) return a;
        if (a.is_constant(0.0)) return fold_neg(b);
        break;
    case BinaryOp::Mul:
        if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
        if (a.is_constant(1.0)) return b;
        if (b.is_constant(1.0)) return a;
        if (a.is_constant(-1.0)) return fold_neg(b);
        if (b.is_constant(-1.0)) return fold_neg(a);
        // canonical form keeps unary minus outside products
        if (a.kind() == NodeKind::Unary)
            return fold_neg(fold_binary(BinaryOp::Mul, a.operand(), b));
        if (b.kind() == NodeKind::Unary)
            return fold_neg(fold_binary(BinaryOp::Mul, a, b.operand()));
        break;
    case BinaryOp::Div:
        if (a.is_constant(0.0)) return Expr::constant(0.0);
        if (b.is_constant(1.0)) return a;
        if (b.is_constant(-1.0)) return fold_neg(a);
        if (a.kind() == NodeKind::Unary)
            return fold_neg(fold_binary(BinaryOp::Div, a.operand(), b));
        if (b.kind() == NodeKind::Unary)
            return fold_neg(fold_binary(BinaryOp::Div, a, b.operand()));
        break;
    case BinaryOp::Pow:
        if (b.is_constant(1.0)) return a;
        if (b.is_constant(0.0)) return Expr::constant(1.0);
        break;
    }
    return raw_binary(op, a, b);
}

bool fold_const_call(FuncKind fn, double x, double& out) {
    switch (fn) {
    case FuncKind::Sin: out = std::sin(x); break;
    case FuncKind::Cos: out = std::cos(x); break;
    case FuncKind::Tan: out = std::tan(x); break;
    case FuncKind::Exp: out = std::exp(x); break;
    case FuncKind::Log:
        if (x <= 0.0) return false;
        out = std::log(x);
        break;
    case FuncKind::Sqrt:
        if (x < 0.0) return false;
        out = std::sqrt(x);
        break;
    }
    return std::isfinite(out);
}

} // namespace

Expr Expr::call(FuncKind fn, Expr arg) {
    if (arg.is_constant()) {
        double v = 0.0;
        if (fold_const_call(fn, arg.value(), v)) return constant(v);
    }
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->fn = fn;
    n->a = std::move(arg.node_);
    return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return fold_binary(BinaryOp::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return fold_binary(BinaryOp::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return fold_binary(BinaryOp::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return fold_binary(BinaryOp::Div, a, b); }
Expr operator-(const Expr& a) { return fold_neg(a); }
Expr pow(const Expr& base, const Expr& exponent) { return fold_binary(BinaryOp::Pow, base, exponent); }
Expr sin(const Expr& e) { return Expr::call(FuncKind::Sin, e); }
Expr cos(const Expr& e) { return Expr::call(FuncKind::Cos, e); }
Expr tan(const Expr& e) { return Expr::call(FuncKind::Tan, e); }
Expr exp(const Expr& e) { return Expr::call(FuncKind::Exp, e); }
Expr log(const Expr& e) { return Expr::call(FuncKind::Log, e); }
Expr sqrt(const Expr& e) { return Expr::call(FuncKind::Sqrt, e); }

// ---------------------------------------------------------------------------
// structural equality

bool Expr::operator==(const Expr& other) const {
    const Node* p = node_.get();
    const Node* q = other.node_.get();
    if (p == q) return true;
    if (p->kind != q->kind) return false;
    switch (p->kind) {
    case NodeKind::Constant:
        return p->value == q->value;
    case NodeKind::Variable:
    case NodeKind::Parameter:
        return p->name == q->name;
    case NodeKind::Unary:
        return Expr(p->a) == Expr(q->a);
    case NodeKind::Binary:
        return p->op == q->op && Expr(p->a) == Expr(q->a) && Expr(p->b) == Expr(q->b);
    case NodeKind::Call:
        return p->fn == q->fn && Expr(p->a) == Expr(q->a);
    }
    return false;
}

// ---------------------------------------------------------------------------
// differentiation

Expr Expr::diff(const std::string& sym) const {
    switch (kind()) {
    case NodeKind::Constant:
        return constant(0.0);
    case NodeKind::Variable:
    case NodeKind::Parameter:
        return constant(name() == sym ? 1.0 : 0.0);
    case NodeKind::Unary:
        return -operand().diff(sym);
    case NodeKind::Binary: {
        Expr u = left(), v = right();
        Expr du = u.diff(sym), dv = v.diff(sym);
        switch (op()) {
        case BinaryOp::Add: return du + dv;
        case BinaryOp::Sub: return du - dv;
        case BinaryOp::Mul: return du * v + u * dv;
        case BinaryOp::Div: return (du * v - u * dv) / pow(v, constant(2.0));
        case BinaryOp::Pow:
            // d(u^v) = v*u^(v-1)*du + u^v*log(u)*dv
            return v * pow(u, v - constant(1.0)) * du +
                   pow(u, v) * jetgeo::log(u) * dv;
        }
        return constant(0.0);
    }
    case NodeKind::Call: {
        Expr u = operand();
        Expr du = u.diff(sym);
        switch (func()) {
        case FuncKind::Sin: return jetgeo::cos(u) * du;
        case FuncKind::Cos: return -(jetgeo::sin(u) * du);
        case FuncKind::Tan:
            return (constant(1.0) + pow(jetgeo::tan(u), constant(2.0))) * du;
        case FuncKind::Exp: return jetgeo::exp(u) * du;
        case FuncKind::Log: return du / u;
        case FuncKind::Sqrt: return du / (constant(2.0) * jetgeo::sqrt(u));
        }
        return constant(0.0);
    }
    }
    return constant(0.0);
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

[[noreturn]] void eval_fail(const std::string& what, const Expr& where) {
    throw EvalError(what + " in '" + where.str() + "'");
}

} // namespace

double Expr::eval(const Bindings& bindings) const {
    switch (kind()) {
    case NodeKind::Constant:
        return value();
    case NodeKind::Variable:
    case NodeKind::Parameter: {
        auto it = bindings.find(name());
        if (it == bindings.end())
            throw EvalError("unbound symbol '" + name() + "'");
        return it->second;
    }
    case NodeKind::Unary:
        return -operand().eval(bindings);
    case NodeKind::Binary: {
        const double x = left().eval(bindings);
        const double y = right().eval(bindings);
        switch (op()) {
        case BinaryOp::Add: return x + y;
        case BinaryOp::Sub: return x - y;
        case BinaryOp::Mul: return x * y;
        case BinaryOp::Div:
            if (y == 0.0) eval_fail("division by zero", *this);
            return x / y;
        case BinaryOp::Pow:
            if (x < 0.0 && y != std::floor(y))
                eval_fail("non-integer power of negative base", *this);
            if (x == 0.0 && y < 0.0) eval_fail("division by zero", *this);
            return std::pow(x, y);
        }
        return 0.0;
    }
    case NodeKind::Call: {
        const double x = operand().eval(bindings);
        switch (func()) {
        case FuncKind::Sin: return std::sin(x);
        case FuncKind::Cos: return std::cos(x);
        case FuncKind::Tan: return std::tan(x);
        case FuncKind::Exp: return std::exp(x);
        case FuncKind::Log:
            if (x <= 0.0) eval_fail("log of non-positive value", *this);
            return std::log(x);
        case FuncKind::Sqrt:
            if (x < 0.0) eval_fail("sqrt of negative value", *this);
            return std::sqrt(x);
        }
        return 0.0;
    }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// printing

namespace {

// precedence: + - (1) < * / (2) < unary - (3) < ^ (4) < atoms (5)
int precedence(const Expr& e) {
    switch (e.kind()) {
    case NodeKind::Binary:
        switch (e.op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
        }
        return 1;
    case NodeKind::Unary:
        return 3;
    case NodeKind::Constant:
        return e.value() < 0.0 ? 3 : 5;  // negative literal prints like unary minus
    default:
        return 5;
    }
}

void format_double(double v, std::string& out) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

void print_node(const Expr& e, std::string& out);

void print_child(const Expr& child, int parent_prec, bool paren_on_tie, std::string& out) {
    const int p = precedence(child);
    const bool paren = p < parent_prec || (p == parent_prec && paren_on_tie);
    if (paren) out += '(';
    print_node(child, out);
    if (paren) out += ')';
}

void print_node(const Expr& e, std::string& out) {
    switch (e.kind()) {
    case NodeKind::Constant: {
        const double v = e.value();
        if (v < 0.0) {
            out += '-';
            format_double(-v, out);
        } else {
            format_double(v, out);
        }
        return;
    }
    case NodeKind::Variable:
    case NodeKind::Parameter:
        out += e.name();
        return;
    case NodeKind::Unary:
        out += '-';
        print_child(e.operand(), 3, false, out);
        return;
    case NodeKind::Binary: {
        const int p = precedence(e);
        const char* sym = "+";
        bool left_tie = false, right_tie = false;
        switch (e.op()) {
        case BinaryOp::Add: sym = "+"; right_tie = true; break;
        case BinaryOp::Sub: sym = "-"; right_tie = true; break;
        case BinaryOp::Mul: sym = "*"; right_tie = true; break;
        case BinaryOp::Div: sym = "/"; right_tie = true; break;
        case BinaryOp::Pow: sym = "^"; left_tie = true; break;  // right-assoc
        }
        print_child(e.left(), p, left_tie, out);
        out += sym;
        print_child(e.right(), p, right_tie, out);
        return;
    }
    case NodeKind::Call:
        out += func_name(e.func());
        out += '(';
        print_node(e.operand(), out);
        out += ')';
        return;
    }
}

} // namespace

std::string Expr::str() const {
    std::string out;
    print_node(*this, out);
    return out;
}

// ---------------------------------------------------------------------------
// free symbols

namespace {

void collect_symbols(const Expr& e, std::set<std::string>& out) {
    switch (e.kind()) {
    case NodeKind::Constant:
        return;
    case NodeKind::Variable:
    case NodeKind::Parameter:
        out.insert(e.name());
        return;
    case NodeKind::Unary:
    case NodeKind::Call:
        collect_symbols(e.operand(), out);
        return;
    case NodeKind::Binary:
        collect_symbols(e.left(), out);
        collect_symbols(e.right(), out);
        return;
    }
}

} // namespace

std::set<std::string> Expr::free_symbols() const {
    std::set<std::string> out;
    collect_symbols(*this, out);
    return out;
}

bool Expr::depends_on(const std::string& sym) const {
    switch (kind()) {
    case NodeKind::Constant:
        return false;
    case NodeKind::Variable:
    case NodeKind::Parameter:
        return name() == sym;
    case NodeKind::Unary:
    case NodeKind::Call:
        return operand().depends_on(sym);
    case NodeKind::Binary:
        return left().depends_on(sym) || right().depends_on(sym);
    }
    return false;
}

// ---------------------------------------------------------------------------
// parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
    double value = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        if (pos_ >= src_.size()) return {Tok::End, pos_, "", 0.0};
        const std::size_t start = pos_;
        const char c = src_[pos_];
        switch (c) {
        case '+': ++pos_; return {Tok::Plus, start, "+", 0.0};
        case '-': ++pos_; return {Tok::Minus, start, "-", 0.0};
        case '*': ++pos_; return {Tok::Star, start, "*", 0.0};
        case '/': ++pos_; return {Tok::Slash, start, "/", 0.0};
        case '^': ++pos_; return {Tok::Caret, start, "^", 0.0};
        case '(': ++pos_; return {Tok::LParen, start, "(", 0.0};
        case ')': ++pos_; return {Tok::RParen, start, ")", 0.0};
        default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(start);
        throw ParseError(start, std::string("unexpected character '") + c + "'");
    }

private:
    Token lex_number(std::size_t start) {
        std::size_t p = start;
        auto digits = [&] {
            std::size_t n = 0;
            while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p, ++n;
            return n;
        };
        const std::size_t int_digits = digits();
        std::size_t frac_digits = 0;
        if (p < src_.size() && src_[p] == '.') {
            ++p;
            frac_digits = digits();
        }
        if (int_digits + frac_digits == 0) throw ParseError(start, "malformed number");
        // exponent only if actually followed by digits
        if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
            std::size_t q = p + 1;
            if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
            if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
                p = q;
                digits();
            }
        }
        const std::string_view span = src_.substr(start, p - start);
        double v = 0.0;
        const auto res = std::from_chars(span.data(), span.data() + span.size(), v);
        if (res.ec != std::errc{} || res.ptr != span.data() + span.size())
            throw ParseError(start, "malformed number '" + std::string(span) + "'");
        pos_ = p;
        return {Tok::Number, start, std::string(span), v};
    }

    Token lex_ident(std::size_t start) {
        std::size_t p = start;
        while (p < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[p])) || src_[p] == '_'))
            ++p;
        pos_ = p;
        return {Tok::Ident, start, std::string(src_.substr(start, p - start)), 0.0};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { advance(); }

    Expr run() {
        Expr e = parse_expr();
        if (cur_.kind != Tok::End)
            throw ParseError(cur_.offset,
                             "expected operator or end of input, found '" + cur_.text + "'");
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    bool accept(Tok k) {
        if (cur_.kind != k) return false;
        advance();
        return true;
    }

    void expect(Tok k, const char* what) {
        if (cur_.kind != k)
            throw ParseError(cur_.offset, std::string("expected ") + what + ", found " +
                                              (cur_.kind == Tok::End ? "end of input"
                                                                     : "'" + cur_.text + "'"));
        advance();
    }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (accept(Tok::Plus)) e = e + parse_term();
            else if (accept(Tok::Minus)) e = e - parse_term();
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        for (;;) {
            if (accept(Tok::Star)) e = e * parse_unary();
            else if (accept(Tok::Slash)) e = e / parse_unary();
            else return e;
        }
    }

    Expr parse_unary() {
        if (accept(Tok::Minus)) return -parse_unary();
        return parse_factor();
    }

    Expr parse_factor() {
        Expr base = parse_base();
        if (accept(Tok::Caret)) return pow(base, parse_unary());
        return base;
    }

    Expr parse_base() {
        if (cur_.kind == Tok::Number) {
            Expr e = Expr::constant(cur_.value);
            advance();
            return e;
        }
        if (cur_.kind == Tok::Ident) {
            const Token ident = cur_;
            advance();
            if (cur_.kind == Tok::LParen) {
                const auto fn = func_from_name(ident.text);
                if (!fn)
                    throw ParseError(ident.offset,
                                     "unknown function '" + ident.text +
                                         "'; expected one of sin, cos, tan, exp, log, sqrt");
                advance();
                Expr arg = parse_expr();
                expect(Tok::RParen, "')'");
                return Expr::call(*fn, arg);
            }
            return Expr::symbol(ident.text);
        }
        if (accept(Tok::LParen)) {
            Expr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        throw ParseError(cur_.offset,
                         std::string("expected number, symbol, or '(', found ") +
                             (cur_.kind == Tok::End ? "end of input" : "'" + cur_.text + "'"));
    }

    Lexer lexer_;
    Token cur_{Tok::End, 0, "", 0.0};
};

} // namespace

Expr parse(std::string_view source) { return Parser(source).run(); }

} // namespace jetgeo
