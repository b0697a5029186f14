#pragma once

// Closed-form scalar expressions over named coordinates. Parsed with a
// recursive-descent parser (precedence ^ > unary minus > * / > + -, left
// associative), evaluated exactly into jets.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subriem/errors.hpp"
#include "subriem/jet.hpp"

namespace subriem {

enum class Fun { sin, cos, tan, exp, log, sqrt, sinh, cosh, tanh, atan };

inline const char* fun_name(Fun f) {
    switch (f) {
        case Fun::sin: return "sin";
        case Fun::cos: return "cos";
        case Fun::tan: return "tan";
        case Fun::exp: return "exp";
        case Fun::log: return "log";
        case Fun::sqrt: return "sqrt";
        case Fun::sinh: return "sinh";
        case Fun::cosh: return "cosh";
        case Fun::tanh: return "tanh";
        case Fun::atan: return "atan";
    }
    return "?";
}

inline bool lookup_fun(std::string_view name, Fun& out) {
    static constexpr Fun all[] = {Fun::sin,  Fun::cos,  Fun::tan,  Fun::exp,  Fun::log,
                                  Fun::sqrt, Fun::sinh, Fun::cosh, Fun::tanh, Fun::atan};
    for (Fun f : all)
        if (name == fun_name(f)) {
            out = f;
            return true;
        }
    return false;
}

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { number, var, neg, add, sub, mul, div, pow, call };
    Kind kind;
    double num = 0.0;   // number
    int var = -1;       // var
    int exponent = 0;   // pow
    Fun fun = Fun::sin; // call
    ExprPtr a, b;
};

class Expr {
public:
    Expr() = default;
    Expr(ExprPtr root, std::vector<std::string> coords)
        : root_(std::move(root)), coords_(std::move(coords)) {}

    const ExprPtr& root() const { return root_; }
    const std::vector<std::string>& coords() const { return coords_; }
    int dim() const { return static_cast<int>(coords_.size()); }
    bool valid() const { return root_ != nullptr; }

private:
    ExprPtr root_;
    std::vector<std::string> coords_;
};

namespace detail {

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& coords)
        : text_(text), coords_(coords) {}

    ExprPtr run() {
        skip_ws();
        if (pos_ >= text_.size()) fail(ErrorKind::parse, "empty expression", pos_);
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ < text_.size()) fail(ErrorKind::parse, "unexpected trailing input", pos_);
        return e;
    }

private:
    static ExprPtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_term();
        for (;;) {
            if (accept('+'))
                e = make({ExprNode::Kind::add, 0, -1, 0, Fun::sin, e, parse_term()});
            else if (accept('-'))
                e = make({ExprNode::Kind::sub, 0, -1, 0, Fun::sin, e, parse_term()});
            else
                return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (accept('*'))
                e = make({ExprNode::Kind::mul, 0, -1, 0, Fun::sin, e, parse_unary()});
            else if (accept('/'))
                e = make({ExprNode::Kind::div, 0, -1, 0, Fun::sin, e, parse_unary()});
            else
                return e;
        }
    }

    ExprPtr parse_unary() {
        if (accept('-'))
            return make({ExprNode::Kind::neg, 0, -1, 0, Fun::sin, parse_unary(), nullptr});
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr e = parse_atom();
        while (accept('^')) {
            skip_ws();
            int sign = 1;
            if (accept('-')) sign = -1;
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ == start) fail(ErrorKind::parse, "expected integer exponent", pos_);
            const int n = std::atoi(std::string(text_.substr(start, pos_ - start)).c_str());
            e = make({ExprNode::Kind::pow, 0, -1, sign * n, Fun::sin, e, nullptr});
        }
        return e;
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail(ErrorKind::parse, "unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        if (accept('(')) {
            ExprPtr e = parse_sum();
            if (!accept(')')) fail(ErrorKind::parse, "expected ')'", pos_);
            return e;
        }
        fail(ErrorKind::parse, std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // 'e' belongs to an identifier or is junk
            }
        }
        const std::string tok(text_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str()) fail(ErrorKind::parse, "malformed number", start);
        return make({ExprNode::Kind::number, v, -1, 0, Fun::sin, nullptr, nullptr});
    }

    ExprPtr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        Fun f;
        if (lookup_fun(name, f)) {
            if (!accept('(')) fail(ErrorKind::parse, "expected '(' after function name", pos_);
            ExprPtr arg = parse_sum();
            if (!accept(')')) fail(ErrorKind::parse, "expected ')'", pos_);
            return make({ExprNode::Kind::call, 0, -1, 0, f, arg, nullptr});
        }
        for (std::size_t i = 0; i < coords_.size(); ++i)
            if (coords_[i] == name)
                return make({ExprNode::Kind::var, 0, static_cast<int>(i), 0, Fun::sin, nullptr,
                             nullptr});
        fail(ErrorKind::parse, "unknown identifier '" + name + "'", start);
    }

    std::string_view text_;
    const std::vector<std::string>& coords_;
    std::size_t pos_ = 0;
};

inline Jet eval_node(const ExprNode& n, std::span<const double> point, int dim, int order) {
    switch (n.kind) {
        case ExprNode::Kind::number: return Jet::constant(dim, order, n.num);
        case ExprNode::Kind::var: return Jet::variable(dim, order, n.var, point[static_cast<std::size_t>(n.var)]);
        case ExprNode::Kind::neg: return -eval_node(*n.a, point, dim, order);
        case ExprNode::Kind::add:
            return eval_node(*n.a, point, dim, order) + eval_node(*n.b, point, dim, order);
        case ExprNode::Kind::sub:
            return eval_node(*n.a, point, dim, order) - eval_node(*n.b, point, dim, order);
        case ExprNode::Kind::mul:
            return eval_node(*n.a, point, dim, order) * eval_node(*n.b, point, dim, order);
        case ExprNode::Kind::div:
            return eval_node(*n.a, point, dim, order) / eval_node(*n.b, point, dim, order);
        case ExprNode::Kind::pow: return pow_int(eval_node(*n.a, point, dim, order), n.exponent);
        case ExprNode::Kind::call: {
            Jet u = eval_node(*n.a, point, dim, order);
            switch (n.fun) {
                case Fun::sin: return sin(u);
                case Fun::cos: return cos(u);
                case Fun::tan: return tan(u);
                case Fun::exp: return exp(u);
                case Fun::log: return log(u);
                case Fun::sqrt: return sqrt(u);
                case Fun::sinh: return sinh(u);
                case Fun::cosh: return cosh(u);
                case Fun::tanh: return tanh(u);
                case Fun::atan: return atan(u);
            }
        }
    }
    fail(ErrorKind::domain, "corrupt expression node");
}

inline int node_prec(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::add:
        case ExprNode::Kind::sub: return 1;
        case ExprNode::Kind::mul:
        case ExprNode::Kind::div: return 2;
        case ExprNode::Kind::neg: return 3;
        case ExprNode::Kind::pow: return 4;
        default: return 5;
    }
}

inline void print_node(const ExprNode& n, const std::vector<std::string>& coords,
                       std::string& out) {
    auto child = [&](const ExprNode& c, int min_prec) {
        if (node_prec(c) < min_prec) {
            out += '(';
            print_node(c, coords, out);
            out += ')';
        } else {
            print_node(c, coords, out);
        }
    };
    switch (n.kind) {
        case ExprNode::Kind::number: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", n.num);
            out += buf;
            return;
        }
        case ExprNode::Kind::var: out += coords[static_cast<std::size_t>(n.var)]; return;
        case ExprNode::Kind::neg:
            out += '-';
            child(*n.a, 3);
            return;
        case ExprNode::Kind::add:
            child(*n.a, 1);
            out += " + ";
            child(*n.b, 2);
            return;
        case ExprNode::Kind::sub:
            child(*n.a, 1);
            out += " - ";
            child(*n.b, 2);
            return;
        case ExprNode::Kind::mul:
            child(*n.a, 2);
            out += "*";
            child(*n.b, 3);
            return;
        case ExprNode::Kind::div:
            child(*n.a, 2);
            out += "/";
            child(*n.b, 3);
            return;
        case ExprNode::Kind::pow:
            child(*n.a, 5);
            out += "^";
            if (n.exponent < 0) out += "-";
            out += std::to_string(std::abs(n.exponent));
            return;
        case ExprNode::Kind::call:
            out += fun_name(n.fun);
            out += '(';
            print_node(*n.a, coords, out);
            out += ')';
            return;
    }
}

}  // namespace detail

inline Expr parse(std::string_view text, std::vector<std::string> coords) {
    if (text.empty()) fail(ErrorKind::parse, "empty expression", 0);
    detail::Parser p(text, coords);
    ExprPtr root = p.run();
    return Expr(std::move(root), std::move(coords));
}

inline Jet eval_jet(const Expr& e, std::span<const double> point, int order) {
    if (!e.valid()) fail(ErrorKind::domain, "empty expression");
    if (static_cast<int>(point.size()) != e.dim())
        fail(ErrorKind::domain, "point dimension does not match declared coordinates");
    if (order < 0) fail(ErrorKind::domain, "negative jet order");
    return detail::eval_node(*e.root(), point, e.dim(), order);
}

inline double eval_value(const Expr& e, std::span<const double> point) {
    return eval_jet(e, point, 0).value();
}

// Serialized form; reparses to a structurally identical tree.
inline std::string to_string(const Expr& e) {
    std::string out;
    if (e.valid()) detail::print_node(*e.root(), e.coords(), out);
    return out;
}

inline bool same_structure(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprNode::Kind::number: return a->num == b->num;
        case ExprNode::Kind::var: return a->var == b->var;
        case ExprNode::Kind::pow:
            return a->exponent == b->exponent && same_structure(a->a, b->a);
        case ExprNode::Kind::call:
            return a->fun == b->fun && same_structure(a->a, b->a);
        case ExprNode::Kind::neg: return same_structure(a->a, b->a);
        default: return same_structure(a->a, b->a) && same_structure(a->b, b->b);
    }
}

}  // namespace subriem
