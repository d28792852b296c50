#pragma once

// Minimal arithmetic expressions in one variable, evaluated on Taylor jets so
// analytic curves get exact derivatives. Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('+'|'-') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 'pi' | var | func '(' expr ')' | '(' expr ')'
// Functions: sin, cos, sqrt, exp, log. The variable may be spelled t, l or lambda.

#include <memory>
#include <string>

#include "scqc/jet.hpp"

namespace scqc {

class Expression {
public:
    /// Throws ValidationError with the column of the offending token.
    static Expression parse(const std::string& text);

    double operator()(double x) const;
    Jet3 operator()(const Jet3& x) const;

    const std::string& text() const { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace scqc
