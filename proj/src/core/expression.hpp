// expression.hpp -- small arithmetic expression grammar (+ - * /, constants,
// named variables) used for kernel modulations, manufactured data and initial
// profiles.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace nlch {

class Expression {
public:
    // Throws Error(invalid) with a position-annotated message on parse failure.
    static Expression parse(const std::string& text);

    double eval(const std::map<std::string, double>& vars) const;
    const std::string& text() const { return text_; }
    bool empty() const { return ops_.empty(); }

    // Variables resolved once against a fixed slot layout; eval then takes the
    // slot values directly (the per-call map lookup is too slow for pair loops).
    class Bound {
    public:
        double eval(const double* slots) const;

    private:
        friend class Expression;
        const Expression* expr_ = nullptr;
        std::vector<int> slot_of_var_;
    };
    Bound bind(const std::vector<std::string>& slot_names) const;

    enum class Op : int { push_const, push_var, add, sub, mul, div, neg };
    struct Instr {
        Op op;
        double value = 0.0;
        int var = -1;
    };

private:
    std::string text_;
    std::vector<Instr> ops_;
    std::vector<std::string> var_names_;

    friend class ExprParser;
};

} // namespace nlch
