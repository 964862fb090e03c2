#include "expression.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "errors.hpp"

namespace nlch {

class ExprParser {
public:
    ExprParser(const std::string& text, Expression& out) : text_(text), out_(out) {}

    void run() {
        parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            fail_invalid("expression: unexpected character '" + std::string(1, text_[pos_]) +
                         "' at position " + std::to_string(pos_));
        if (out_.ops_.empty()) fail_invalid("expression: empty input");
        // evaluation uses a fixed stack; bound the depth now
        int depth = 0, peak = 0;
        for (const auto& in : out_.ops_) {
            if (in.op == Expression::Op::push_const || in.op == Expression::Op::push_var)
                ++depth;
            else if (in.op != Expression::Op::neg)
                --depth;
            peak = std::max(peak, depth);
        }
        if (peak >= 64) fail_invalid("expression: too deeply nested");
        if (out_.var_names_.size() > 16) fail_invalid("expression: too many distinct variables");
    }

private:
    const std::string& text_;
    Expression& out_;
    std::size_t pos_ = 0;

    void emit(Expression::Op op, double value = 0.0, int var = -1) {
        out_.ops_.push_back({op, value, var});
    }

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

    void parse_expr() {
        parse_term();
        for (;;) {
            if (accept('+')) {
                parse_term();
                emit(Expression::Op::add);
            } else if (accept('-')) {
                parse_term();
                emit(Expression::Op::sub);
            } else {
                return;
            }
        }
    }

    void parse_term() {
        parse_factor();
        for (;;) {
            if (accept('*')) {
                parse_factor();
                emit(Expression::Op::mul);
            } else if (accept('/')) {
                parse_factor();
                emit(Expression::Op::div);
            } else {
                return;
            }
        }
    }

    void parse_factor() {
        skip_ws();
        if (pos_ >= text_.size()) fail_invalid("expression: unexpected end of input");
        char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            parse_factor();
            emit(Expression::Op::neg);
            return;
        }
        if (c == '(') {
            ++pos_;
            parse_expr();
            if (!accept(')'))
                fail_invalid("expression: missing ')' at position " + std::to_string(pos_));
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.c_str() + pos_;
            char* end = nullptr;
            double value = std::strtod(begin, &end);
            if (end == begin) fail_invalid("expression: bad number at position " + std::to_string(pos_));
            pos_ += static_cast<std::size_t>(end - begin);
            emit(Expression::Op::push_const, value);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name = text_.substr(start, pos_ - start);
            int id = -1;
            for (std::size_t i = 0; i < out_.var_names_.size(); ++i)
                if (out_.var_names_[i] == name) id = static_cast<int>(i);
            if (id < 0) {
                id = static_cast<int>(out_.var_names_.size());
                out_.var_names_.push_back(name);
            }
            emit(Expression::Op::push_var, 0.0, id);
            return;
        }
        fail_invalid("expression: unexpected character '" + std::string(1, c) + "' at position " +
                     std::to_string(pos_));
    }
};

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.text_ = text;
    ExprParser(text, e).run();
    return e;
}

namespace {

double run_ops(const std::vector<Expression::Instr>& ops, const double* vars);

} // namespace

double Expression::eval(const std::map<std::string, double>& vars) const {
    std::vector<double> bound(var_names_.size());
    for (std::size_t i = 0; i < var_names_.size(); ++i) {
        auto it = vars.find(var_names_[i]);
        if (it == vars.end())
            fail_invalid("expression: unknown variable '" + var_names_[i] + "'");
        bound[i] = it->second;
    }
    return run_ops(ops_, bound.data());
}

Expression::Bound Expression::bind(const std::vector<std::string>& slot_names) const {
    Bound b;
    b.expr_ = this;
    b.slot_of_var_.resize(var_names_.size(), -1);
    for (std::size_t v = 0; v < var_names_.size(); ++v) {
        for (std::size_t s = 0; s < slot_names.size(); ++s)
            if (slot_names[s] == var_names_[v]) {
                b.slot_of_var_[v] = static_cast<int>(s);
                break;
            }
        if (b.slot_of_var_[v] < 0)
            fail_invalid("expression: unknown variable '" + var_names_[v] + "'");
    }
    return b;
}

double Expression::Bound::eval(const double* slots) const {
    double vars[16];
    for (std::size_t v = 0; v < slot_of_var_.size(); ++v)
        vars[v] = slots[slot_of_var_[v]];
    return run_ops(expr_->ops_, vars);
}

namespace {

double run_ops(const std::vector<Expression::Instr>& ops, const double* vars) {
    double stack[64];
    stack[0] = 0.0;
    int top = 0;
    for (const Expression::Instr& in : ops) {
        switch (in.op) {
        case Expression::Op::push_const: stack[top++] = in.value; break;
        case Expression::Op::push_var: stack[top++] = vars[in.var]; break;
        case Expression::Op::add: --top; stack[top - 1] += stack[top]; break;
        case Expression::Op::sub: --top; stack[top - 1] -= stack[top]; break;
        case Expression::Op::mul: --top; stack[top - 1] *= stack[top]; break;
        case Expression::Op::div: --top; stack[top - 1] /= stack[top]; break;
        case Expression::Op::neg: stack[top - 1] = -stack[top - 1]; break;
        }
    }
    return stack[0];
}

} // namespace

} // namespace nlch
