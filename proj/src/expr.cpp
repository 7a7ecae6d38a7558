#include "tsdelay/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

namespace tsdelay {

namespace {

ExprPtr make_number(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Number;
    e->number = v;
    return e;
}

ExprPtr make_variable(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Variable;
    e->name = std::move(name);
    return e;
}

ExprPtr make_unary(ExprPtr arg) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Unary;
    e->args = {std::move(arg)};
    return e;
}

ExprPtr make_binary(char op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->op = op;
    e->args = {std::move(lhs), std::move(rhs)};
    return e;
}

ExprPtr make_call(std::string name, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Call;
    e->name = std::move(name);
    e->args = std::move(args);
    return e;
}

int builtin_arity(const std::string& name) {
    if (name == "sin" || name == "cos" || name == "exp" || name == "log" ||
        name == "sqrt" || name == "abs" || name == "floor")
        return 1;
    if (name == "min" || name == "max") return 2;
    return -1;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    ExprPtr run() {
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) syntax("unexpected trailing input");
        return e;
    }

private:
    // sum     := product (('+' | '-') product)*
    // product := unary (('*' | '/') unary)*
    // unary   := '-' unary | power
    // power   := primary ('^' unary)?        right associative via the unary tail
    // primary := number | name ['(' args ')'] | '(' sum ')'

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_product();
        for (;;) {
            skip_ws();
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                const char op = s_[pos_++];
                lhs = make_binary(op, std::move(lhs), parse_product());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_product() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '/')) {
                const char op = s_[pos_++];
                lhs = make_binary(op, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_unary() {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '-') {
            ++pos_;
            return make_unary(parse_unary());
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '^') {
            ++pos_;
            return make_binary('^', std::move(base), parse_unary());
        }
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) syntax("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr inner = parse_sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        syntax(std::string("unexpected character '") + c + "'");
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && s_[start] == '.'))
            syntax("malformed number");
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            std::size_t digits = p;
            while (digits < s_.size() && std::isdigit(static_cast<unsigned char>(s_[digits])))
                ++digits;
            if (digits > p) pos_ = digits;
        }
        return make_number(std::stod(s_.substr(start, pos_ - start)));
    }

    ExprPtr parse_name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '(') {
            ++pos_;
            std::vector<ExprPtr> args;
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ')') {
                ++pos_;
            } else {
                args.push_back(parse_sum());
                for (;;) {
                    skip_ws();
                    if (pos_ < s_.size() && s_[pos_] == ',') {
                        ++pos_;
                        args.push_back(parse_sum());
                    } else {
                        break;
                    }
                }
                expect(')');
            }
            const int arity = builtin_arity(name);
            if (arity < 0)
                fail(ErrorCode::UnknownFunction, "unknown function '" + name + "'");
            if (static_cast<int>(args.size()) != arity)
                fail(ErrorCode::Arity, "'" + name + "' takes " + std::to_string(arity) +
                                           " argument(s), got " + std::to_string(args.size()));
            return make_call(std::move(name), std::move(args));
        }
        return make_variable(std::move(name));
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != c)
            syntax(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    [[noreturn]] void syntax(const std::string& what) {
        fail(ErrorCode::Syntax, what + " at offset " + std::to_string(pos_));
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

double apply_call(const std::string& name, const std::vector<double>& a) {
    if (name == "sin") return std::sin(a[0]);
    if (name == "cos") return std::cos(a[0]);
    if (name == "exp") return std::exp(a[0]);
    if (name == "log") {
        if (!(a[0] > 0.0))
            fail(ErrorCode::MathDomain, "log of a nonpositive value");
        return std::log(a[0]);
    }
    if (name == "sqrt") {
        if (a[0] < 0.0) fail(ErrorCode::MathDomain, "sqrt of a negative value");
        return std::sqrt(a[0]);
    }
    if (name == "abs") return std::fabs(a[0]);
    if (name == "floor") return std::floor(a[0]);
    if (name == "min") return std::fmin(a[0], a[1]);
    if (name == "max") return std::fmax(a[0], a[1]);
    fail(ErrorCode::UnknownFunction, "unknown function '" + name + "'");
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ExprPtr parse_expression(const std::string& text) { return Parser(text).run(); }

double eval_expression(const Expr& e, const std::map<std::string, double>& bindings) {
    switch (e.kind) {
    case Expr::Kind::Number:
        return e.number;
    case Expr::Kind::Variable: {
        auto it = bindings.find(e.name);
        if (it == bindings.end())
            fail(ErrorCode::UnboundVariable, "variable '" + e.name + "' has no binding");
        return it->second;
    }
    case Expr::Kind::Unary:
        return -eval_expression(*e.args[0], bindings);
    case Expr::Kind::Binary: {
        const double a = eval_expression(*e.args[0], bindings);
        const double b = eval_expression(*e.args[1], bindings);
        switch (e.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': {
            const double r = std::pow(a, b);
            if (std::isnan(r) && !std::isnan(a) && !std::isnan(b))
                fail(ErrorCode::MathDomain, "power has no real value");
            return r;
        }
        default: fail(ErrorCode::Syntax, "corrupt expression node");
        }
    }
    case Expr::Kind::Call: {
        std::vector<double> vals;
        vals.reserve(e.args.size());
        for (const ExprPtr& a : e.args) vals.push_back(eval_expression(*a, bindings));
        return apply_call(e.name, vals);
    }
    }
    fail(ErrorCode::Syntax, "corrupt expression node");
}

double eval_expression(const ExprPtr& e, const std::map<std::string, double>& bindings) {
    return eval_expression(*e, bindings);
}

std::string to_string(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Number:
        return format_number(e.number);
    case Expr::Kind::Variable:
        return e.name;
    case Expr::Kind::Unary:
        return "(-" + to_string(*e.args[0]) + ")";
    case Expr::Kind::Binary:
        return "(" + to_string(*e.args[0]) + " " + e.op + " " + to_string(*e.args[1]) + ")";
    case Expr::Kind::Call: {
        std::string out = e.name + "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) out += ", ";
            out += to_string(*e.args[i]);
        }
        return out + ")";
    }
    }
    return "";
}

std::string to_string(const ExprPtr& e) { return to_string(*e); }

bool same_structure(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case Expr::Kind::Number:
        return a.number == b.number;
    case Expr::Kind::Variable:
        return a.name == b.name;
    case Expr::Kind::Unary:
        break;
    case Expr::Kind::Binary:
        if (a.op != b.op) return false;
        break;
    case Expr::Kind::Call:
        if (a.name != b.name) return false;
        break;
    }
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!same_structure(*a.args[i], *b.args[i])) return false;
    return true;
}

bool same_structure(const ExprPtr& a, const ExprPtr& b) { return same_structure(*a, *b); }

void collect_variables(const Expr& e, std::set<std::string>& out) {
    if (e.kind == Expr::Kind::Variable) out.insert(e.name);
    for (const ExprPtr& a : e.args) collect_variables(*a, out);
}

} // namespace tsdelay
