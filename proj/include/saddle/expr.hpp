#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "saddle/errors.hpp"

namespace saddle {

// A two-variable arithmetic expression over x and y. The base grammar is
// +, -, *, /, min, max, abs, parentheses, and numeric literals; enabling
// the float profile adds sqrt, exp, log, sin, cos, pow. Expressions used
// as payoffs must evaluate to a finite value at every sample; that check
// lives with the caller, which knows the sample coordinates.
class Expression {
public:
    static Expression parse(const std::string& text, bool float_profile = false) {
        Parser p{text, 0, float_profile};
        Expression e;
        e.text_ = text;
        e.float_profile_ = float_profile;
        e.root_ = p.parse_expr(e.nodes_, 0);
        p.skip_ws();
        if (p.pos != text.size()) {
            throw input_error("unexpected trailing input at position " + std::to_string(p.pos) +
                              " in expression");
        }
        return e;
    }

    [[nodiscard]] double eval(double x, double y) const { return eval_node(root_, x, y); }

    [[nodiscard]] const std::string& text() const { return text_; }
    [[nodiscard]] bool float_profile() const { return float_profile_; }

private:
    enum class Op { Num, VarX, VarY, Add, Sub, Mul, Div, Neg, Min, Max, Abs, Sqrt, Exp, Log, Sin, Cos, Pow };

    struct Node {
        Op op = Op::Num;
        double num = 0.0;
        int a = -1;
        int b = -1;
    };

    static constexpr int kMaxDepth = 200;

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string text_;
    bool float_profile_ = false;

    [[nodiscard]] double eval_node(int idx, double x, double y) const {
        const Node& n = nodes_[static_cast<std::size_t>(idx)];
        switch (n.op) {
        case Op::Num: return n.num;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Add: return eval_node(n.a, x, y) + eval_node(n.b, x, y);
        case Op::Sub: return eval_node(n.a, x, y) - eval_node(n.b, x, y);
        case Op::Mul: return eval_node(n.a, x, y) * eval_node(n.b, x, y);
        case Op::Div: return eval_node(n.a, x, y) / eval_node(n.b, x, y);
        case Op::Neg: return -eval_node(n.a, x, y);
        case Op::Min: return std::fmin(eval_node(n.a, x, y), eval_node(n.b, x, y));
        case Op::Max: return std::fmax(eval_node(n.a, x, y), eval_node(n.b, x, y));
        case Op::Abs: return std::fabs(eval_node(n.a, x, y));
        case Op::Sqrt: return std::sqrt(eval_node(n.a, x, y));
        case Op::Exp: return std::exp(eval_node(n.a, x, y));
        case Op::Log: return std::log(eval_node(n.a, x, y));
        case Op::Sin: return std::sin(eval_node(n.a, x, y));
        case Op::Cos: return std::cos(eval_node(n.a, x, y));
        case Op::Pow: return std::pow(eval_node(n.a, x, y), eval_node(n.b, x, y));
        }
        return 0.0;
    }

    struct Parser {
        const std::string& text;
        std::size_t pos;
        bool float_profile;

        void skip_ws() {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        }

        [[nodiscard]] char peek() {
            skip_ws();
            return pos < text.size() ? text[pos] : '\0';
        }

        void expect(char c) {
            if (peek() != c) {
                throw input_error(std::string("expected '") + c + "' at position " +
                                  std::to_string(pos) + " in expression");
            }
            ++pos;
        }

        int parse_expr(std::vector<Node>& nodes, int depth) {
            check_depth(depth);
            int lhs = parse_term(nodes, depth + 1);
            while (true) {
                const char c = peek();
                if (c != '+' && c != '-') return lhs;
                ++pos;
                const int rhs = parse_term(nodes, depth + 1);
                lhs = add(nodes, Node{c == '+' ? Op::Add : Op::Sub, 0.0, lhs, rhs});
            }
        }

        int parse_term(std::vector<Node>& nodes, int depth) {
            check_depth(depth);
            int lhs = parse_unary(nodes, depth + 1);
            while (true) {
                const char c = peek();
                if (c != '*' && c != '/') return lhs;
                ++pos;
                const int rhs = parse_unary(nodes, depth + 1);
                lhs = add(nodes, Node{c == '*' ? Op::Mul : Op::Div, 0.0, lhs, rhs});
            }
        }

        int parse_unary(std::vector<Node>& nodes, int depth) {
            check_depth(depth);
            const char c = peek();
            if (c == '-') {
                ++pos;
                return add(nodes, Node{Op::Neg, 0.0, parse_unary(nodes, depth + 1), -1});
            }
            if (c == '+') {
                ++pos;
                return parse_unary(nodes, depth + 1);
            }
            return parse_primary(nodes, depth + 1);
        }

        int parse_primary(std::vector<Node>& nodes, int depth) {
            check_depth(depth);
            const char c = peek();
            if (c == '(') {
                ++pos;
                const int inner = parse_expr(nodes, depth + 1);
                expect(')');
                return inner;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                return parse_number(nodes);
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                return parse_ident(nodes, depth);
            }
            throw input_error("unexpected character at position " + std::to_string(pos) +
                              " in expression");
        }

        int parse_number(std::vector<Node>& nodes) {
            const char* start = text.c_str() + pos;
            char* end = nullptr;
            const double v = std::strtod(start, &end);
            if (end == start) {
                throw input_error("malformed number at position " + std::to_string(pos) +
                                  " in expression");
            }
            if (!std::isfinite(v)) {
                throw input_error("numeric literal overflows at position " + std::to_string(pos) +
                                  " in expression");
            }
            pos += static_cast<std::size_t>(end - start);
            return add(nodes, Node{Op::Num, v, -1, -1});
        }

        int parse_ident(std::vector<Node>& nodes, int depth) {
            const std::size_t start = pos;
            while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
            const std::string name = text.substr(start, pos - start);
            if (name == "x") return add(nodes, Node{Op::VarX, 0.0, -1, -1});
            if (name == "y") return add(nodes, Node{Op::VarY, 0.0, -1, -1});
            const auto unary = [&](Op op) {
                expect('(');
                const int a = parse_expr(nodes, depth + 1);
                expect(')');
                return add(nodes, Node{op, 0.0, a, -1});
            };
            const auto binary = [&](Op op) {
                expect('(');
                const int a = parse_expr(nodes, depth + 1);
                expect(',');
                const int b = parse_expr(nodes, depth + 1);
                expect(')');
                return add(nodes, Node{op, 0.0, a, b});
            };
            if (name == "min") return binary(Op::Min);
            if (name == "max") return binary(Op::Max);
            if (name == "abs") return unary(Op::Abs);
            const bool profile_fn = name == "sqrt" || name == "exp" || name == "log" ||
                                    name == "sin" || name == "cos" || name == "pow";
            if (profile_fn && !float_profile) {
                throw input_error("function '" + name +
                                  "' requires the float profile (enable it in options)");
            }
            if (name == "sqrt") return unary(Op::Sqrt);
            if (name == "exp") return unary(Op::Exp);
            if (name == "log") return unary(Op::Log);
            if (name == "sin") return unary(Op::Sin);
            if (name == "cos") return unary(Op::Cos);
            if (name == "pow") return binary(Op::Pow);
            throw input_error("unknown identifier '" + name + "' at position " +
                              std::to_string(start) + " in expression");
        }

        static void check_depth(int depth) {
            if (depth > kMaxDepth) {
                throw input_error("expression nests too deeply");
            }
        }

        static int add(std::vector<Node>& nodes, Node n) {
            nodes.push_back(n);
            return static_cast<int>(nodes.size() - 1);
        }
    };
};

} // namespace saddle
