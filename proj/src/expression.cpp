#include "beamide/expression.hpp"

#include "beamide/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace beamide {

enum class Func { sin, cos, sinh, cosh, exp, abs, sqrt };

struct Expression::Node {
    enum class Kind { number, variable, negate, binary, call };

    Kind kind = Kind::number;
    double value = 0.0;
    std::size_t variable = 0;
    char op = 0;
    Func func = Func::sin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

struct FuncName {
    const char* name;
    Func func;
};

constexpr std::array<FuncName, 7> kFunctions = {{{"sin", Func::sin},
                                                 {"cos", Func::cos},
                                                 {"sinh", Func::sinh},
                                                 {"cosh", Func::cosh},
                                                 {"exp", Func::exp},
                                                 {"abs", Func::abs},
                                                 {"sqrt", Func::sqrt}}};

const char* func_name(Func f) {
    for (const auto& e : kFunctions) {
        if (e.func == f) {
            return e.name;
        }
    }
    return "?";
}

NodePtr make_number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::number;
    n->value = v;
    return n;
}

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

    NodePtr parse() {
        skip_space();
        if (pos_ == text_.size()) {
            throw ParseError(ParseError::Kind::syntax, pos_, "empty expression");
        }
        NodePtr e = expr();
        skip_space();
        if (pos_ != text_.size()) {
            throw ParseError(ParseError::Kind::syntax, pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return e;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                       text_[pos_] == '\r')) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(ParseError::Kind::syntax, pos_,
                             std::string("expected '") + c + "'" +
                                 (pos_ < text_.size() ? "" : " before end of input"));
        }
    }

    static NodePtr binary(char op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::binary;
        n->op = op;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }

    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            if (accept('+')) {
                left = binary('+', left, term());
            } else if (accept('-')) {
                left = binary('-', left, term());
            } else {
                return left;
            }
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            if (accept('*')) {
                left = binary('*', left, unary());
            } else if (accept('/')) {
                left = binary('/', left, unary());
            } else {
                return left;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::negate;
            n->lhs = unary();
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) {
            return binary('^', base, unary());
        }
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ == text_.size()) {
            throw ParseError(ParseError::Kind::syntax, pos_, "unexpected end of input");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') {
            return number();
        }
        if (is_ident_start(c)) {
            return identifier();
        }
        throw ParseError(ParseError::Kind::syntax, pos_, "unexpected '" + std::string(1, c) + "'");
    }

    static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    NodePtr number() {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < text_.size() && is_digit(text_[end])) {
            ++end;
        }
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            while (end < text_.size() && is_digit(text_[end])) {
                ++end;
            }
        }
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) {
                ++e;
            }
            if (e < text_.size() && is_digit(text_[e])) {
                while (e < text_.size() && is_digit(text_[e])) {
                    ++e;
                }
                end = e;
            }
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, v);
        if (ec != std::errc() || ptr != text_.data() + end || !std::isfinite(v)) {
            throw ParseError(ParseError::Kind::syntax, start, "malformed number");
        }
        pos_ = end;
        return make_number(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) {
            ++pos_;
        }
        const std::string name(text_.substr(start, pos_ - start));

        for (const auto& f : kFunctions) {
            if (name == f.name) {
                return call(f.func, name, start);
            }
        }
        if (name == "pi") {
            return make_number(std::numbers::pi);
        }
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::variable;
                n->variable = i;
                return n;
            }
        }
        throw ParseError(ParseError::Kind::unknown_identifier, start, "unknown identifier '" + name + "'");
    }

    NodePtr call(Func func, const std::string& name, std::size_t start) {
        if (!accept('(')) {
            throw ParseError(ParseError::Kind::syntax, pos_, "function '" + name + "' needs '('");
        }
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::call;
        n->func = func;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ')') {
            throw ParseError(ParseError::Kind::arity, start, "function '" + name + "' takes 1 argument, got 0");
        }
        n->lhs = expr();
        int count = 1;
        while (accept(',')) {
            expr();
            ++count;
        }
        if (count != 1) {
            throw ParseError(ParseError::Kind::arity, start,
                             "function '" + name + "' takes 1 argument, got " + std::to_string(count));
        }
        expect(')');
        return n;
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

[[noreturn]] void fault(const std::string& what) { throw ExpressionFault("expression domain fault: " + what); }

double checked(double v, const char* what) {
    if (!std::isfinite(v)) {
        fault(std::string(what) + " is not finite");
    }
    return v;
}

double eval(const Node& n, std::span<const double> args) {
    switch (n.kind) {
        case Node::Kind::number: return n.value;
        case Node::Kind::variable: return args[n.variable];
        case Node::Kind::negate: return -eval(*n.lhs, args);
        case Node::Kind::call: {
            const double a = eval(*n.lhs, args);
            switch (n.func) {
                case Func::sin: return std::sin(a);
                case Func::cos: return std::cos(a);
                case Func::sinh: return checked(std::sinh(a), "sinh");
                case Func::cosh: return checked(std::cosh(a), "cosh");
                case Func::exp: return checked(std::exp(a), "exp");
                case Func::abs: return std::abs(a);
                case Func::sqrt:
                    if (a < 0.0) {
                        fault("sqrt of negative number " + std::to_string(a));
                    }
                    return std::sqrt(a);
            }
            break;
        }
        case Node::Kind::binary: {
            const double a = eval(*n.lhs, args);
            const double b = eval(*n.rhs, args);
            switch (n.op) {
                case '+': return checked(a + b, "sum");
                case '-': return checked(a - b, "difference");
                case '*': return checked(a * b, "product");
                case '/':
                    if (b == 0.0) {
                        fault("division by zero");
                    }
                    return checked(a / b, "quotient");
                default: return checked(std::pow(a, b), "power");
            }
        }
    }
    fault("corrupt expression tree");
}

void print(const Node& n, const std::vector<std::string>& vars, std::string& out) {
    switch (n.kind) {
        case Node::Kind::number: {
            if (n.value == std::numbers::pi) {
                out += "pi";
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            return;
        }
        case Node::Kind::variable: out += vars[n.variable]; return;
        case Node::Kind::negate:
            out += "(-";
            print(*n.lhs, vars, out);
            out += ')';
            return;
        case Node::Kind::call:
            out += func_name(n.func);
            out += '(';
            print(*n.lhs, vars, out);
            out += ')';
            return;
        case Node::Kind::binary:
            out += '(';
            print(*n.lhs, vars, out);
            out += ' ';
            out += n.op;
            out += ' ';
            print(*n.rhs, vars, out);
            out += ')';
            return;
    }
}

bool references(const Node& n, std::size_t var) {
    switch (n.kind) {
        case Node::Kind::variable: return n.variable == var;
        case Node::Kind::negate:
        case Node::Kind::call: return references(*n.lhs, var);
        case Node::Kind::binary: return references(*n.lhs, var) || references(*n.rhs, var);
        default: return false;
    }
}

NodePtr negate_var(const NodePtr& n, std::size_t var) {
    switch (n->kind) {
        case Node::Kind::variable: {
            if (n->variable != var) {
                return n;
            }
            auto neg = std::make_shared<Node>();
            neg->kind = Node::Kind::negate;
            neg->lhs = n;
            return neg;
        }
        case Node::Kind::negate:
        case Node::Kind::call: {
            auto copy = std::make_shared<Node>(*n);
            copy->lhs = negate_var(n->lhs, var);
            return copy;
        }
        case Node::Kind::binary: {
            auto copy = std::make_shared<Node>(*n);
            copy->lhs = negate_var(n->lhs, var);
            copy->rhs = negate_var(n->rhs, var);
            return copy;
        }
        default: return n;
    }
}

}  // namespace

Expression::Expression() : root_(make_number(0.0)) {}

Expression::Expression(std::shared_ptr<const Node> root, std::vector<std::string> variables)
    : root_(std::move(root)), variables_(std::move(variables)) {}

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
    Parser parser(text, variables);
    NodePtr root = parser.parse();
    return Expression(std::move(root), std::move(variables));
}

double Expression::evaluate(std::span<const double> args) const {
    if (args.size() != variables_.size()) {
        throw UsageError("expression expects " + std::to_string(variables_.size()) + " arguments, got " +
                         std::to_string(args.size()));
    }
    for (double a : args) {
        if (!std::isfinite(a)) {
            fault("non-finite argument");
        }
    }
    return checked(eval(*root_, args), "result");
}

double Expression::operator()(double a) const { return evaluate(std::array<double, 1>{a}); }
double Expression::operator()(double a, double b) const { return evaluate(std::array<double, 2>{a, b}); }
double Expression::operator()(double a, double b, double c) const {
    return evaluate(std::array<double, 3>{a, b, c});
}

bool Expression::uses(std::string_view variable) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i] == variable) {
            return references(*root_, i);
        }
    }
    return false;
}

Expression Expression::with_variables(std::vector<std::string> variables) const {
    if (variables.size() != variables_.size()) {
        throw UsageError("with_variables: expected " + std::to_string(variables_.size()) + " names");
    }
    return Expression(root_, std::move(variables));
}

Expression Expression::negating(std::string_view variable) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i] == variable) {
            return Expression(negate_var(root_, i), variables_);
        }
    }
    throw UsageError("negating: unknown variable '" + std::string(variable) + "'");
}

std::string Expression::to_string() const {
    std::string out;
    print(*root_, variables_, out);
    return out;
}

}  // namespace beamide
