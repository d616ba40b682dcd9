#include "curvkit/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "curvkit/errors.hpp"

namespace curvkit {

namespace {

constexpr std::array<std::string_view, 5> kFunctions = {"exp", "log", "sin", "cos", "sqrt"};

bool is_known_function(std::string_view name) {
    for (auto f : kFunctions)
        if (f == name) return true;
    return false;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprPtr parse() {
        auto e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    ExprPtr make_binary(char op, ExprPtr l, ExprPtr r, std::size_t off) {
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::binary;
        e->op = op;
        e->args = {std::move(l), std::move(r)};
        e->offset = off;
        return e;
    }

    ExprPtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            const char c = peek();
            if (c != '+' && c != '-') return lhs;
            const std::size_t off = pos_;
            ++pos_;
            lhs = make_binary(c, std::move(lhs), parse_term(), off);
        }
    }

    ExprPtr parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            const char c = peek();
            if (c != '*' && c != '/') return lhs;
            const std::size_t off = pos_;
            ++pos_;
            lhs = make_binary(c, std::move(lhs), parse_factor(), off);
        }
    }

    ExprPtr parse_factor() {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '-') {
            const std::size_t off = pos_;
            ++pos_;
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::negate;
            e->args = {parse_power()};
            e->offset = off;
            return e;
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        auto base = parse_atom();
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '^') {
            const std::size_t off = pos_;
            ++pos_;
            return make_binary('^', std::move(base), parse_factor(), off);
        }
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // "1e" with no exponent digits: 'e' is not part of the number
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size()) throw ParseError("malformed number literal", start);
        // An identifier character glued to a number ("2x1") is a syntax error:
        // implicit multiplication is not part of the grammar.
        if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            throw ParseError("identifier may not follow a number literal (implicit multiplication is not supported)", pos_);
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::number;
        e->number = v;
        e->offset = start;
        return e;
    }

    ExprPtr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            if (!is_known_function(name))
                throw ParseError("unknown function '" + name + "'", start);
            ++pos_;
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::call;
            e->name = std::move(name);
            e->offset = start;
            e->args.push_back(parse_expr());
            while (eat(',')) e->args.push_back(parse_expr());
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            if (e->args.size() != 1)
                throw ParseError("function '" + e->name + "' takes exactly one argument", start);
            return e;
        }
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::identifier;
        e->name = std::move(name);
        e->offset = start;
        return e;
    }
};

void format_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void format_rec(std::string& out, const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::number:
            format_number(out, e.number);
            break;
        case Expr::Kind::identifier:
            out += e.name;
            break;
        case Expr::Kind::negate:
            out += "(-";
            format_rec(out, *e.args[0]);
            out += ')';
            break;
        case Expr::Kind::binary:
            out += '(';
            format_rec(out, *e.args[0]);
            out += ' ';
            out += e.op;
            out += ' ';
            format_rec(out, *e.args[1]);
            out += ')';
            break;
        case Expr::Kind::call:
            out += e.name;
            out += '(';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                format_rec(out, *e.args[i]);
            }
            out += ')';
            break;
    }
}

int coordinate_index(std::string_view name, std::span<const std::string> coordinates) {
    for (std::size_t i = 0; i < coordinates.size(); ++i)
        if (coordinates[i] == name) return static_cast<int>(i);
    return -1;
}

// Evaluation primitives shared by the jet and plain-value walks. The double
// overloads enforce the same domain restrictions the Jet3 functions do.
Jet3 ev_div(const Jet3& a, const Jet3& b) { return a / b; }
double ev_div(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
}
Jet3 ev_pow_int(const Jet3& b, int e) { return pow(b, e); }
double ev_pow_int(double b, int e) {
    if (b == 0.0 && e < 0) throw DomainError("division by zero");
    return std::pow(b, e);
}
Jet3 ev_pow(const Jet3& b, const Jet3& e) { return exp(e * log(b)); }
double ev_pow(double b, double e) {
    if (b <= 0.0) throw DomainError("pow of nonpositive base");
    return std::pow(b, e);
}
Jet3 ev_call(const std::string& name, const Jet3& a) {
    if (name == "exp") return exp(a);
    if (name == "log") return log(a);
    if (name == "sin") return sin(a);
    if (name == "cos") return cos(a);
    return sqrt(a);
}
double ev_call(const std::string& name, double a) {
    if (name == "exp") return std::exp(a);
    if (name == "log") {
        if (a <= 0.0) throw DomainError("log of nonpositive value");
        return std::log(a);
    }
    if (name == "sin") return std::sin(a);
    if (name == "cos") return std::cos(a);
    if (a <= 0.0) throw DomainError("sqrt of nonpositive value");
    return std::sqrt(a);
}

template <typename Value, typename SeedFn, typename ConstFn>
Value eval_rec(const Expr& e, std::span<const std::string> coordinates, const ParamMap& parameters,
               const SeedFn& seed, const ConstFn& constant) {
    switch (e.kind) {
        case Expr::Kind::number:
            return constant(e.number);
        case Expr::Kind::identifier: {
            const int ci = coordinate_index(e.name, coordinates);
            if (ci >= 0) return seed(ci);
            auto it = parameters.find(e.name);
            if (it != parameters.end()) return constant(it->second);
            throw ParseError("unknown identifier '" + e.name + "'", e.offset);
        }
        case Expr::Kind::negate:
            return -eval_rec<Value>(*e.args[0], coordinates, parameters, seed, constant);
        case Expr::Kind::binary: {
            auto lhs = eval_rec<Value>(*e.args[0], coordinates, parameters, seed, constant);
            if (e.op == '^') {
                const Expr& re = *e.args[1];
                // Integer literal exponents keep the base sign-unrestricted.
                if (re.kind == Expr::Kind::number && re.number == std::floor(re.number) &&
                    std::abs(re.number) < 64.0)
                    return ev_pow_int(lhs, static_cast<int>(re.number));
                auto rhs = eval_rec<Value>(*e.args[1], coordinates, parameters, seed, constant);
                return ev_pow(lhs, rhs);
            }
            auto rhs = eval_rec<Value>(*e.args[1], coordinates, parameters, seed, constant);
            switch (e.op) {
                case '+': return lhs + rhs;
                case '-': return lhs - rhs;
                case '*': return lhs * rhs;
                default: return ev_div(lhs, rhs);
            }
        }
        case Expr::Kind::call:
            return ev_call(e.name, eval_rec<Value>(*e.args[0], coordinates, parameters, seed, constant));
    }
    throw Error("corrupt expression tree");
}

} // namespace

ExprPtr parse_expression(std::string_view src) {
    if (src.empty()) throw ParseError("empty expression", 0);
    return Parser(src).parse();
}

std::string format_expression(const Expr& ast) {
    std::string out;
    format_rec(out, ast);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::number:
            return a.number == b.number;
        case Expr::Kind::identifier:
            return a.name == b.name;
        case Expr::Kind::negate:
            return structurally_equal(*a.args[0], *b.args[0]);
        case Expr::Kind::binary:
            return a.op == b.op && structurally_equal(*a.args[0], *b.args[0]) &&
                   structurally_equal(*a.args[1], *b.args[1]);
        case Expr::Kind::call:
            if (a.name != b.name || a.args.size() != b.args.size()) return false;
            for (std::size_t i = 0; i < a.args.size(); ++i)
                if (!structurally_equal(*a.args[i], *b.args[i])) return false;
            return true;
    }
    return false;
}

void validate_symbols(const Expr& ast, std::span<const std::string> coordinates,
                      const ParamMap& parameters) {
    if (ast.kind == Expr::Kind::identifier) {
        if (coordinate_index(ast.name, coordinates) < 0 && !parameters.contains(ast.name))
            throw ParseError("unknown identifier '" + ast.name + "'", ast.offset);
        return;
    }
    for (const auto& c : ast.args) validate_symbols(*c, coordinates, parameters);
}

Jet3 evaluate_jet(const Expr& ast, std::span<const std::string> coordinates,
                  std::span<const double> point, const ParamMap& parameters) {
    const int n = static_cast<int>(point.size());
    auto seed = [&](int i) { return Jet3::seed(n, i, point[i]); };
    auto constant = [&](double v) { return Jet3::constant(n, v); };
    return eval_rec<Jet3>(ast, coordinates, parameters, seed, constant);
}

double evaluate_value(const Expr& ast, std::span<const std::string> coordinates,
                      std::span<const double> point, const ParamMap& parameters) {
    auto seed = [&](int i) { return point[i]; };
    auto constant = [](double v) { return v; };
    return eval_rec<double>(ast, coordinates, parameters, seed, constant);
}

bool Inequality::holds(std::span<const std::string> coordinates, std::span<const double> point,
                       const ParamMap& parameters) const {
    const double l = evaluate_value(*lhs, coordinates, point, parameters);
    const double r = evaluate_value(*rhs, coordinates, point, parameters);
    switch (cmp) {
        case Cmp::lt: return l < r;
        case Cmp::le: return l <= r;
        case Cmp::gt: return l > r;
        case Cmp::ge: return l >= r;
    }
    return false;
}

Inequality parse_inequality(std::string_view src) {
    // The expression grammar never uses '<' or '>', so the comparator is the
    // first occurrence of either character.
    std::size_t cut = src.find_first_of("<>");
    if (cut == std::string_view::npos) throw ParseError("expected a comparison operator", src.size());
    Inequality out;
    const bool less = src[cut] == '<';
    std::size_t rhs_start = cut + 1;
    bool equal = rhs_start < src.size() && src[rhs_start] == '=';
    if (equal) ++rhs_start;
    out.cmp = less ? (equal ? Inequality::Cmp::le : Inequality::Cmp::lt)
                   : (equal ? Inequality::Cmp::ge : Inequality::Cmp::gt);
    out.lhs = parse_expression(src.substr(0, cut));
    out.rhs = parse_expression(src.substr(rhs_start));
    return out;
}

} // namespace curvkit
