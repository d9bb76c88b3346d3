#include "ddm/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

#include <fmt/format.h>

namespace ddm {

enum class NodeKind { Number, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Exp, Tanh, Sqrt, Abs };

struct Expression::Node {
    NodeKind kind = NodeKind::Number;
    double value = 0.0;
    Func func = Func::Sin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

constexpr std::array<std::pair<std::string_view, Func>, 6> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"exp", Func::Exp},
    {"tanh", Func::Tanh},
    {"sqrt", Func::Sqrt},
    {"abs", Func::Abs},
}};

std::string_view func_name(Func f) {
    for (const auto& [name, fn] : kFunctions) {
        if (fn == f) return name;
    }
    return "?";
}

NodePtr make_number(double v) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = NodeKind::Number;
    n->value = v;
    return n;
}

NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse_all() {
        NodePtr root = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) {
            throw ParseError(fmt::format("unexpected '{}' at offset {}", text_[pos_], pos_), pos_);
        }
        return root;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) {
                throw ParseError(fmt::format("expected '{}' at end of input (offset {})", c, pos_), pos_);
            }
            throw ParseError(fmt::format("expected '{}' at offset {}", c, pos_), pos_);
        }
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_node(NodeKind::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = make_node(NodeKind::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_node(NodeKind::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = make_node(NodeKind::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_node(NodeKind::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make_node(NodeKind::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) {
            throw ParseError(fmt::format("unexpected end of input at offset {}", pos_), pos_);
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError(fmt::format("unexpected '{}' at offset {}", c, pos_), pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError(fmt::format("malformed number at offset {}", start), start);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;  // "2e" is 2 followed by identifier e
        }
        double v = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
            throw ParseError(fmt::format("malformed number at offset {}", start), start);
        }
        return make_number(v);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "x") return make_node(NodeKind::VarX, nullptr);
        if (name == "y") return make_node(NodeKind::VarY, nullptr);
        for (const auto& [fname, fn] : kFunctions) {
            if (name == fname) {
                expect('(');
                auto call = std::make_shared<Expression::Node>();
                call->kind = NodeKind::Call;
                call->func = fn;
                call->lhs = parse_expr();
                expect(')');
                return call;
            }
        }
        throw UnknownIdentifier(fmt::format("unknown identifier '{}' at offset {}", name, start), start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw EvalError(fmt::format("non-finite result in {}", what));
    return v;
}

double eval_node(const Expression::Node& n, const Point& p) {
    switch (n.kind) {
        case NodeKind::Number: return n.value;
        case NodeKind::VarX: return p.x;
        case NodeKind::VarY: return p.y;
        case NodeKind::Neg: return -eval_node(*n.lhs, p);
        case NodeKind::Add: return checked(eval_node(*n.lhs, p) + eval_node(*n.rhs, p), "'+'");
        case NodeKind::Sub: return checked(eval_node(*n.lhs, p) - eval_node(*n.rhs, p), "'-'");
        case NodeKind::Mul: return checked(eval_node(*n.lhs, p) * eval_node(*n.rhs, p), "'*'");
        case NodeKind::Div: {
            const double num = eval_node(*n.lhs, p);
            const double den = eval_node(*n.rhs, p);
            if (den == 0.0) throw EvalError("division by zero");
            return checked(num / den, "'/'");
        }
        case NodeKind::Pow: {
            const double base = eval_node(*n.lhs, p);
            const double ex = eval_node(*n.rhs, p);
            if (base == 0.0 && ex < 0.0) throw EvalError("division by zero in '^'");
            if (base < 0.0 && std::trunc(ex) != ex) throw EvalError("negative base with fractional exponent");
            return checked(std::pow(base, ex), "'^'");
        }
        case NodeKind::Call: {
            const double a = eval_node(*n.lhs, p);
            switch (n.func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Exp: return checked(std::exp(a), "exp");
                case Func::Tanh: return std::tanh(a);
                case Func::Sqrt:
                    if (a < 0.0) throw EvalError("sqrt of negative argument");
                    return std::sqrt(a);
                case Func::Abs: return std::abs(a);
            }
        }
    }
    throw EvalError("corrupt expression tree");
}

int precedence(const Expression::Node& n) {
    switch (n.kind) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Neg: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;
    }
}

void print_node(const Expression::Node& n, std::string& out);

void print_wrapped(const Expression::Node& n, bool parens, std::string& out) {
    if (parens) out += '(';
    print_node(n, out);
    if (parens) out += ')';
}

void print_node(const Expression::Node& n, std::string& out) {
    const int prec = precedence(n);
    switch (n.kind) {
        case NodeKind::Number: {
            std::array<char, 32> buf{};
            auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
            out.append(buf.data(), end);
            return;
        }
        case NodeKind::VarX: out += 'x'; return;
        case NodeKind::VarY: out += 'y'; return;
        case NodeKind::Neg:
            out += '-';
            print_wrapped(*n.lhs, precedence(*n.lhs) < 3, out);
            return;
        case NodeKind::Pow:
            print_wrapped(*n.lhs, precedence(*n.lhs) < 5, out);
            out += '^';
            print_wrapped(*n.rhs, precedence(*n.rhs) < 3, out);
            return;
        case NodeKind::Call:
            out += func_name(n.func);
            out += '(';
            print_node(*n.lhs, out);
            out += ')';
            return;
        default: {
            static constexpr std::string_view kOps = "+-*/";
            const char op = kOps[static_cast<int>(n.kind) - static_cast<int>(NodeKind::Add)];
            print_wrapped(*n.lhs, precedence(*n.lhs) < prec, out);
            out += op;
            print_wrapped(*n.rhs, precedence(*n.rhs) <= prec, out);
            return;
        }
    }
}

bool references(const Expression::Node& n, NodeKind var) {
    if (n.kind == var) return true;
    if (n.lhs && references(*n.lhs, var)) return true;
    return n.rhs && references(*n.rhs, var);
}

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what), offset_(offset) {}

Expression::Expression() : root_(make_number(0.0)) {}

Expression::Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse_all()); }

Expression Expression::constant(double value) {
    if (!std::isfinite(value)) throw EvalError("constant expression must be finite");
    if (value < 0.0) return Expression(make_node(NodeKind::Neg, make_number(-value)));
    return Expression(make_number(value));
}

double Expression::evaluate(const Point& p) const { return eval_node(*root_, p); }

std::string Expression::to_string() const {
    std::string out;
    print_node(*root_, out);
    return out;
}

bool Expression::is_constant() const {
    return !references(*root_, NodeKind::VarX) && !references(*root_, NodeKind::VarY);
}

bool Expression::uses_y() const { return references(*root_, NodeKind::VarY); }

}  // namespace ddm
