#include "vecthost/expression.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>
#include <vector>

namespace vecthost {

namespace {
const double kPi = 3.14159265358979323846;
}

enum class NodeKind { Number, VarX, VarY, VarA, Pi, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Abs, Min, Max };

struct ExprNode {
    NodeKind kind;
    double number = 0.0;
    std::shared_ptr<const ExprNode> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(NodeKind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Number;
    n->number = v;
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr run() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ < s_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r' || s_[pos_] == '\n'))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        NodePtr e = parse_term();
        for (;;) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                NodePtr r = parse_term();
                e = make(c == '+' ? NodeKind::Add : NodeKind::Sub, e, r);
            } else {
                return e;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_unary();
        for (;;) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos_;
                NodePtr r = parse_unary();
                e = make(c == '*' ? NodeKind::Mul : NodeKind::Div, e, r);
            } else {
                return e;
            }
        }
    }

    // Unary minus binds looser than ^, so -2^2 is -(2^2).
    NodePtr parse_unary() {
        if (peek() == '-') {
            ++pos_;
            return make(NodeKind::Neg, parse_unary());
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (peek() == '^') {
            ++pos_;
            NodePtr ex = parse_unary(); // right-associative, exponent may be signed
            return make(NodeKind::Pow, base, ex);
        }
        return base;
    }

    NodePtr parse_atom() {
        char c = peek();
        size_t start = pos_;
        if (c == '\0') throw ParseError("unexpected end of expression", pos_);
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }

    NodePtr parse_number() {
        size_t start = pos_;
        size_t p = pos_;
        bool any_digit = false;
        while (p < s_.size() && s_[p] >= '0' && s_[p] <= '9') { ++p; any_digit = true; }
        if (p < s_.size() && s_[p] == '.') {
            ++p;
            while (p < s_.size() && s_[p] >= '0' && s_[p] <= '9') { ++p; any_digit = true; }
        }
        if (!any_digit) throw ParseError("malformed number", start);
        if (p < s_.size() && (s_[p] == 'e' || s_[p] == 'E')) {
            size_t q = p + 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
            if (q < s_.size() && s_[q] >= '0' && s_[q] <= '9') {
                while (q < s_.size() && s_[q] >= '0' && s_[q] <= '9') ++q;
                p = q;
            }
        }
        double value = 0.0;
        auto res = std::from_chars(s_.data() + start, s_.data() + p, value);
        if (res.ec != std::errc() || res.ptr != s_.data() + p)
            throw ParseError("malformed number", start);
        pos_ = p;
        return make_number(value);
    }

    NodePtr parse_ident() {
        size_t start = pos_;
        size_t p = pos_;
        while (p < s_.size() &&
               ((s_[p] >= 'a' && s_[p] <= 'z') || (s_[p] >= 'A' && s_[p] <= 'Z') ||
                (s_[p] >= '0' && s_[p] <= '9') || s_[p] == '_'))
            ++p;
        std::string_view name = s_.substr(start, p - start);
        pos_ = p;
        if (peek() == '(') {
            NodeKind k;
            int arity;
            if (name == "sin") { k = NodeKind::Sin; arity = 1; }
            else if (name == "cos") { k = NodeKind::Cos; arity = 1; }
            else if (name == "exp") { k = NodeKind::Exp; arity = 1; }
            else if (name == "abs") { k = NodeKind::Abs; arity = 1; }
            else if (name == "min") { k = NodeKind::Min; arity = 2; }
            else if (name == "max") { k = NodeKind::Max; arity = 2; }
            else throw ParseError("unknown function '" + std::string(name) + "'", start);
            ++pos_; // consume '('
            NodePtr a = parse_sum();
            NodePtr b;
            if (arity == 2) {
                if (peek() != ',') throw ParseError("expected ','", pos_);
                ++pos_;
                b = parse_sum();
            }
            if (peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            return make(k, a, b);
        }
        if (name == "x") return make(NodeKind::VarX);
        if (name == "y") return make(NodeKind::VarY);
        if (name == "a") return make(NodeKind::VarA);
        if (name == "pi") return make(NodeKind::Pi);
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
};

double eval_node(const ExprNode& n, double x, double y, double a) {
    switch (n.kind) {
        case NodeKind::Number: return n.number;
        case NodeKind::VarX: return x;
        case NodeKind::VarY: return y;
        case NodeKind::VarA: return a;
        case NodeKind::Pi: return kPi;
        case NodeKind::Neg: return -eval_node(*n.a, x, y, a);
        case NodeKind::Add: return eval_node(*n.a, x, y, a) + eval_node(*n.b, x, y, a);
        case NodeKind::Sub: return eval_node(*n.a, x, y, a) - eval_node(*n.b, x, y, a);
        case NodeKind::Mul: return eval_node(*n.a, x, y, a) * eval_node(*n.b, x, y, a);
        case NodeKind::Div: {
            double num = eval_node(*n.a, x, y, a);
            double den = eval_node(*n.b, x, y, a);
            if (den == 0.0) throw EvalError("division by zero");
            return num / den;
        }
        case NodeKind::Pow: {
            double base = eval_node(*n.a, x, y, a);
            double ex = eval_node(*n.b, x, y, a);
            double r = std::pow(base, ex);
            if (std::isnan(r)) throw EvalError("invalid power (nan result)");
            return r;
        }
        case NodeKind::Sin: return std::sin(eval_node(*n.a, x, y, a));
        case NodeKind::Cos: return std::cos(eval_node(*n.a, x, y, a));
        case NodeKind::Exp: return std::exp(eval_node(*n.a, x, y, a));
        case NodeKind::Abs: return std::abs(eval_node(*n.a, x, y, a));
        case NodeKind::Min: return std::min(eval_node(*n.a, x, y, a), eval_node(*n.b, x, y, a));
        case NodeKind::Max: return std::max(eval_node(*n.a, x, y, a), eval_node(*n.b, x, y, a));
    }
    throw EvalError("corrupt expression node");
}

bool uses_var(const ExprNode& n, NodeKind var) {
    if (n.kind == var) return true;
    if (n.a && uses_var(*n.a, var)) return true;
    if (n.b && uses_var(*n.b, var)) return true;
    return false;
}

void print_node(const ExprNode& n, std::string& out) {
    auto binary = [&](const char* op) {
        out += '(';
        print_node(*n.a, out);
        out += op;
        print_node(*n.b, out);
        out += ')';
    };
    auto call = [&](const char* name) {
        out += name;
        out += '(';
        print_node(*n.a, out);
        if (n.b) {
            out += ',';
            print_node(*n.b, out);
        }
        out += ')';
    };
    switch (n.kind) {
        case NodeKind::Number: {
            char buf[40];
            auto r = std::to_chars(buf, buf + sizeof buf, n.number);
            out.append(buf, r.ptr);
            return;
        }
        case NodeKind::VarX: out += 'x'; return;
        case NodeKind::VarY: out += 'y'; return;
        case NodeKind::VarA: out += 'a'; return;
        case NodeKind::Pi: out += "pi"; return;
        case NodeKind::Neg:
            out += "(-";
            print_node(*n.a, out);
            out += ')';
            return;
        case NodeKind::Add: binary("+"); return;
        case NodeKind::Sub: binary("-"); return;
        case NodeKind::Mul: binary("*"); return;
        case NodeKind::Div: binary("/"); return;
        case NodeKind::Pow: binary("^"); return;
        case NodeKind::Sin: call("sin"); return;
        case NodeKind::Cos: call("cos"); return;
        case NodeKind::Exp: call("exp"); return;
        case NodeKind::Abs: call("abs"); return;
        case NodeKind::Min: call("min"); return;
        case NodeKind::Max: call("max"); return;
    }
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == NodeKind::Number) {
        // Bit-level comparison so that 0.0 and -0.0 stay distinguishable.
        double x = a.number, y = b.number;
        return std::memcmp(&x, &y, sizeof x) == 0;
    }
    if (!!a.a != !!b.a || !!a.b != !!b.b) return false;
    if (a.a && !equal_nodes(*a.a, *b.a)) return false;
    if (a.b && !equal_nodes(*a.b, *b.b)) return false;
    return true;
}

} // namespace

Expression::Expression() = default;
Expression::Expression(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(const Expression&) = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::~Expression() = default;

Expression Expression::parse(std::string_view text) {
    Expression e;
    e.root_ = Parser(text).run();
    e.source_.assign(text.begin(), text.end());
    return e;
}

double Expression::eval(double x, double y, double a) const {
    if (!root_) throw EvalError("evaluating an empty expression");
    return eval_node(*root_, x, y, a);
}

double Expression::eval_age(double a) const {
    if (uses_x() || uses_y())
        throw EvalError("expression of age must not use x or y: " + source_);
    return eval(0.0, 0.0, a);
}

bool Expression::uses_x() const { return root_ && uses_var(*root_, NodeKind::VarX); }
bool Expression::uses_y() const { return root_ && uses_var(*root_, NodeKind::VarY); }
bool Expression::uses_a() const { return root_ && uses_var(*root_, NodeKind::VarA); }

std::string Expression::to_string() const {
    std::string out;
    if (root_) print_node(*root_, out);
    return out;
}

bool Expression::operator==(const Expression& o) const {
    if (!root_ || !o.root_) return !root_ && !o.root_;
    return equal_nodes(*root_, *o.root_);
}

ScalarField evaluate_field(const Expression& e, const Grid& g, Mask m) {
    if (e.uses_a())
        throw SimError("spatial expression must not use the age variable: " + e.source());
    ScalarField f(g, m);
    const auto cells = g.active_cells(m);
    for (size_t i = 0; i < cells.size(); ++i) {
        int c = cells[i];
        double val;
        try {
            val = e.eval(g.cx(g.ix_of(c)), g.cy(g.iy_of(c)), 0.0);
        } catch (const EvalError& err) {
            std::ostringstream os;
            os << err.what() << " while evaluating '" << e.source() << "' at cell ("
               << g.ix_of(c) << "," << g.iy_of(c) << ")";
            throw EvalError(os.str());
        }
        if (!std::isfinite(val)) {
            std::ostringstream os;
            os << "non-finite value from '" << e.source() << "' at cell (" << g.ix_of(c) << ","
               << g.iy_of(c) << ")";
            throw EvalError(os.str());
        }
        f[static_cast<int>(i)] = val;
    }
    return f;
}

} // namespace vecthost
