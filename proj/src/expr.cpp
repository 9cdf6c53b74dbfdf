#include "hml/expr.hpp"
#include "hml/special_functions.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

namespace hml {
namespace detail {

enum class NodeKind { Number, Constant, Variable, Unary, Binary, Call };
enum class ConstName { Pi, E };
enum class VarName { T, X };
enum class FuncName { Sin, Cos, Exp, Ln, Abs, Sqrt, Erfc };
enum class BinOp { Add, Sub, Mul, Div, Pow };

struct ExprNode {
    NodeKind kind;
    SourceSpan span;

    double number = 0.0;              // Number
    ConstName constant = ConstName::Pi; // Constant
    VarName variable = VarName::T;    // Variable
    FuncName func = FuncName::Sin;    // Call
    BinOp op = BinOp::Add;            // Binary
    std::shared_ptr<const ExprNode> lhs, rhs; // Unary/Call use lhs only
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

// ---------------------------------------------------------------- lexer ----

enum class TokKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    TokKind kind;
    SourceSpan span;
    double number = 0.0;
    std::string ident;
};

[[noreturn]] void fail_parse(const std::string& msg, SourceSpan span) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (at offset %zu)", span.offset);
    throw ParseError(msg + buf, span);
}

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            while (i < n && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
            if (i < n && (s[i] == 'e' || s[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (s[j] == '+' || s[j] == '-')) ++j;
                if (j < n && std::isdigit(static_cast<unsigned char>(s[j]))) {
                    i = j;
                    while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                }
            }
            const SourceSpan span{start, i - start};
            const std::string text = s.substr(start, i - start);
            char* end = nullptr;
            const double v = std::strtod(text.c_str(), &end);
            if (end != text.c_str() + text.size() || !std::isfinite(v))
                fail_parse("malformed number '" + text + "'", span);
            out.push_back({TokKind::Number, span, v, {}});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < n && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            out.push_back({TokKind::Ident, {start, i - start}, 0.0, s.substr(start, i - start)});
            continue;
        }
        TokKind k;
        switch (c) {
            case '+': k = TokKind::Plus; break;
            case '-': k = TokKind::Minus; break;
            case '*': k = TokKind::Star; break;
            case '/': k = TokKind::Slash; break;
            case '^': k = TokKind::Caret; break;
            case '(': k = TokKind::LParen; break;
            case ')': k = TokKind::RParen; break;
            case ',': k = TokKind::Comma; break;
            default:
                fail_parse(std::string("unexpected character '") + c + "'", {start, 1});
        }
        out.push_back({k, {start, 1}, 0.0, {}});
        ++i;
    }
    out.push_back({TokKind::End, {n, 0}, 0.0, {}});
    return out;
}

// --------------------------------------------------------------- parser ----

// Pratt parser. Binding powers: +/- (10,11), */ (20,21), unary - (25),
// ^ (30,29) so that exponentiation is right-associative and binds tighter
// than unary minus: -x^2 parses as -(x^2), 2^-3 as 2^(-3).
class Parser {
public:
    explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

    NodePtr parse() {
        NodePtr e = parse_bp(0);
        if (peek().kind != TokKind::End)
            fail_parse("unexpected trailing input", peek().span);
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& advance() { return toks_[pos_++]; }

    static SourceSpan join(SourceSpan a, SourceSpan b) {
        const std::size_t lo = std::min(a.offset, b.offset);
        const std::size_t hi = std::max(a.offset + a.length, b.offset + b.length);
        return {lo, hi - lo};
    }

    NodePtr parse_bp(int min_bp) {
        NodePtr lhs = parse_prefix();
        for (;;) {
            const Token& t = peek();
            int lbp, rbp;
            BinOp op;
            switch (t.kind) {
                case TokKind::Plus:  lbp = 10; rbp = 11; op = BinOp::Add; break;
                case TokKind::Minus: lbp = 10; rbp = 11; op = BinOp::Sub; break;
                case TokKind::Star:  lbp = 20; rbp = 21; op = BinOp::Mul; break;
                case TokKind::Slash: lbp = 20; rbp = 21; op = BinOp::Div; break;
                case TokKind::Caret: lbp = 30; rbp = 29; op = BinOp::Pow; break;
                default: return lhs;
            }
            if (lbp < min_bp) return lhs;
            advance();
            NodePtr rhs = parse_bp(rbp);
            auto node = std::make_shared<ExprNode>();
            node->kind = NodeKind::Binary;
            node->op = op;
            node->span = join(lhs->span, rhs->span);
            node->lhs = std::move(lhs);
            node->rhs = std::move(rhs);
            lhs = std::move(node);
        }
    }

    NodePtr parse_prefix() {
        const Token& t = advance();
        switch (t.kind) {
            case TokKind::Number: {
                auto node = std::make_shared<ExprNode>();
                node->kind = NodeKind::Number;
                node->number = t.number;
                node->span = t.span;
                return node;
            }
            case TokKind::Minus: {
                NodePtr operand = parse_bp(25);
                auto node = std::make_shared<ExprNode>();
                node->kind = NodeKind::Unary;
                node->span = join(t.span, operand->span);
                node->lhs = std::move(operand);
                return node;
            }
            case TokKind::LParen: {
                NodePtr inner = parse_bp(0);
                if (peek().kind != TokKind::RParen)
                    fail_parse("expected ')'", peek().span);
                advance();
                return inner;
            }
            case TokKind::Ident:
                return parse_name(t);
            case TokKind::End:
                fail_parse("unexpected end of expression", t.span);
            default:
                fail_parse("expected a value", t.span);
        }
    }

    NodePtr parse_name(const Token& t) {
        auto node = std::make_shared<ExprNode>();
        node->span = t.span;
        if (t.ident == "t" || t.ident == "x") {
            node->kind = NodeKind::Variable;
            node->variable = (t.ident == "t") ? VarName::T : VarName::X;
            return node;
        }
        if (t.ident == "pi" || t.ident == "e") {
            node->kind = NodeKind::Constant;
            node->constant = (t.ident == "pi") ? ConstName::Pi : ConstName::E;
            return node;
        }
        FuncName fn;
        if (t.ident == "sin") fn = FuncName::Sin;
        else if (t.ident == "cos") fn = FuncName::Cos;
        else if (t.ident == "exp") fn = FuncName::Exp;
        else if (t.ident == "ln") fn = FuncName::Ln;
        else if (t.ident == "abs") fn = FuncName::Abs;
        else if (t.ident == "sqrt") fn = FuncName::Sqrt;
        else if (t.ident == "erfc") fn = FuncName::Erfc;
        else fail_parse("unknown name '" + t.ident + "'", t.span);

        if (peek().kind != TokKind::LParen)
            fail_parse("function '" + t.ident + "' requires an argument list", peek().span);
        advance();
        NodePtr arg = parse_bp(0);
        if (peek().kind == TokKind::Comma)
            fail_parse("function '" + t.ident + "' takes exactly one argument", peek().span);
        if (peek().kind != TokKind::RParen)
            fail_parse("expected ')'", peek().span);
        const Token& close = advance();
        node->kind = NodeKind::Call;
        node->func = fn;
        node->lhs = std::move(arg);
        node->span = join(t.span, close.span);
        return node;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ------------------------------------------------------------ evaluator ----

double eval_node(const ExprNode& n, double t, double x) {
    double v = std::nan(""); // stays NaN (and throws below) on any corrupt node
    switch (n.kind) {
        case NodeKind::Number:   v = n.number; break;
        case NodeKind::Constant: v = (n.constant == ConstName::Pi) ? M_PI : M_E; break;
        case NodeKind::Variable: v = (n.variable == VarName::T) ? t : x; break;
        case NodeKind::Unary:    v = -eval_node(*n.lhs, t, x); break;
        case NodeKind::Binary: {
            const double a = eval_node(*n.lhs, t, x);
            const double b = eval_node(*n.rhs, t, x);
            switch (n.op) {
                case BinOp::Add: v = a + b; break;
                case BinOp::Sub: v = a - b; break;
                case BinOp::Mul: v = a * b; break;
                case BinOp::Div: v = a / b; break;
                case BinOp::Pow: v = std::pow(a, b); break;
            }
            break;
        }
        case NodeKind::Call: {
            const double a = eval_node(*n.lhs, t, x);
            switch (n.func) {
                case FuncName::Sin:  v = std::sin(a); break;
                case FuncName::Cos:  v = std::cos(a); break;
                case FuncName::Exp:  v = std::exp(a); break;
                case FuncName::Ln:   v = std::log(a); break;
                case FuncName::Abs:  v = std::fabs(a); break;
                case FuncName::Sqrt: v = std::sqrt(a); break;
                case FuncName::Erfc: v = hml::erfc(a); break;
            }
            break;
        }
        default: v = std::nan("");
    }
    if (!std::isfinite(v)) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "expression produced a non-finite value (at offset %zu, length %zu)",
                      n.span.offset, n.span.length);
        throw EvalError(buf, n.span);
    }
    return v;
}

// -------------------------------------------------------------- printer ----

int precedence(const ExprNode& n) {
    switch (n.kind) {
        case NodeKind::Binary:
            switch (n.op) {
                case BinOp::Add: case BinOp::Sub: return 10;
                case BinOp::Mul: case BinOp::Div: return 20;
                case BinOp::Pow: return 30;
            }
            return 0;
        case NodeKind::Unary: return 25;
        default: return 100; // atoms never need parentheses
    }
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, int parent_prec, bool needs_parens_at_equal, std::string& out) {
    const bool parens = precedence(child) < parent_prec ||
                        (needs_parens_at_equal && precedence(child) == parent_prec);
    if (parens) out += '(';
    print_node(child, out);
    if (parens) out += ')';
}

void print_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            out += buf;
            break;
        }
        case NodeKind::Constant: out += (n.constant == ConstName::Pi) ? "pi" : "e"; break;
        case NodeKind::Variable: out += (n.variable == VarName::T) ? "t" : "x"; break;
        case NodeKind::Unary:
            out += '-';
            print_child(*n.lhs, 25, false, out);
            break;
        case NodeKind::Binary: {
            const int prec = precedence(n);
            const char* sym = "";
            switch (n.op) {
                case BinOp::Add: sym = " + "; break;
                case BinOp::Sub: sym = " - "; break;
                case BinOp::Mul: sym = "*"; break;
                case BinOp::Div: sym = "/"; break;
                case BinOp::Pow: sym = "^"; break;
            }
            // Left-associative ops need parens on an equal-precedence right
            // child (a - (b - c)); right-associative ^ the other way round.
            const bool right_assoc = n.op == BinOp::Pow;
            print_child(*n.lhs, prec, right_assoc, out);
            out += sym;
            print_child(*n.rhs, prec, !right_assoc, out);
            break;
        }
        case NodeKind::Call: {
            switch (n.func) {
                case FuncName::Sin:  out += "sin"; break;
                case FuncName::Cos:  out += "cos"; break;
                case FuncName::Exp:  out += "exp"; break;
                case FuncName::Ln:   out += "ln"; break;
                case FuncName::Abs:  out += "abs"; break;
                case FuncName::Sqrt: out += "sqrt"; break;
                case FuncName::Erfc: out += "erfc"; break;
            }
            out += '(';
            print_node(*n.lhs, out);
            out += ')';
            break;
        }
    }
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Number:   return a.number == b.number;
        case NodeKind::Constant: return a.constant == b.constant;
        case NodeKind::Variable: return a.variable == b.variable;
        case NodeKind::Unary:    return nodes_equal(*a.lhs, *b.lhs);
        case NodeKind::Binary:
            return a.op == b.op && nodes_equal(*a.lhs, *b.lhs) && nodes_equal(*a.rhs, *b.rhs);
        case NodeKind::Call:
            return a.func == b.func && nodes_equal(*a.lhs, *b.lhs);
    }
    return false;
}

} // namespace
} // namespace detail

double Expr::eval(double t, double x) const {
    if (!root_) throw EvalError("evaluating an empty expression", {0, 0});
    if (!std::isfinite(t) || !std::isfinite(x))
        throw EvalError("expression inputs must be finite", root_->span);
    return detail::eval_node(*root_, t, x);
}

std::string Expr::to_string() const {
    if (!root_) return "";
    std::string out;
    detail::print_node(*root_, out);
    return out;
}

bool Expr::structurally_equal(const Expr& other) const {
    if (!root_ || !other.root_) return root_ == other.root_;
    return detail::nodes_equal(*root_, *other.root_);
}

Expr parse_expression(const std::string& text) {
    detail::Parser p(text);
    Expr e;
    e.root_ = p.parse();
    return e;
}

} // namespace hml
