#pragma once

// Expert-knowledge rule language (.ekr).
//
//   # comment to end of line
//   prop lesion := threshold(feature "lesion_count", >=, 1)
//   prop dense  := sigmoid(feature "exudate", center=0.4, scale=0.1, direction=+)
//   rule Grade2 := lesion & (dense | !thin)
//
// Precedence is `!` over `&` over `|`; binary operators associate left.

#include "eksaii/errors.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace eksaii::rules {

enum class TokenKind {
    Ident,
    And,
    Or,
    Not,
    LParen,
    RParen,
    Assign,
    Keyword,
    Number,
    String,
    Comma,
    Compare,  // < <= > >=
    Equals,   // named-argument `=`
    Sign,     // bare `+` / `-` (sigmoid direction)
};

std::string_view token_kind_name(TokenKind kind) noexcept;

struct Token {
    TokenKind kind;
    std::string lexeme;  // String lexemes keep their quotes
    SourcePosition position;

    friend bool operator==(const Token&, const Token&) = default;
};

// Throws LexError at the first character outside the alphabet.
std::vector<Token> tokenize(std::string_view text);

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable propositional formula over named atoms.
class Expr {
public:
    enum class Kind { Atom, Not, And, Or };

    static ExprPtr atom(std::string name);
    static ExprPtr negate(ExprPtr operand);
    static ExprPtr conj(ExprPtr lhs, ExprPtr rhs);
    static ExprPtr disj(ExprPtr lhs, ExprPtr rhs);

    Kind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    const Expr& operand() const noexcept { return *lhs_; }
    const Expr& lhs() const noexcept { return *lhs_; }
    const Expr& rhs() const noexcept { return *rhs_; }

    friend bool operator==(const Expr& a, const Expr& b);

    Expr(Kind kind, std::string name, ExprPtr lhs, ExprPtr rhs)
        : kind_(kind), name_(std::move(name)), lhs_(std::move(lhs)), rhs_(std::move(rhs))
    {
    }

private:
    Kind kind_;
    std::string name_;
    ExprPtr lhs_;
    ExprPtr rhs_;
};

// Distinct atom names in first-occurrence (left-to-right) order.
std::vector<std::string> atoms(const Expr& expr);

// Minimal parenthesization; parse_expr(format_expr(e)) == e.
std::string format_expr(const Expr& expr);

// Parses a bare expression (no declarations, no validation).
ExprPtr parse_expr(std::string_view text);

enum class CompareOp { Less, LessEqual, Greater, GreaterEqual };
std::string_view compare_op_text(CompareOp op) noexcept;

struct ExtractorDecl {
    enum class Kind { Threshold, Sigmoid };

    std::string proposition;
    Kind kind = Kind::Threshold;
    std::string feature;
    // threshold
    CompareOp op = CompareOp::Greater;
    double value = 0.0;
    // sigmoid
    double center = 0.0;
    double scale = 1.0;
    int direction = +1;

    SourcePosition position;
};

struct ClassRuleDecl {
    std::string label;
    ExprPtr rule;
    SourcePosition position;
};

// Parsed knowledge base. Weights are per class, keyed by proposition name,
// and absent until fitted.
struct RuleSet {
    std::vector<ExtractorDecl> extractors;
    std::vector<ClassRuleDecl> rules;
    std::map<std::string, std::map<std::string, double>> weights;

    const ExtractorDecl* extractor(std::string_view proposition) const;
    const ClassRuleDecl* rule(std::string_view label) const;
    std::vector<std::string> class_labels() const;  // declaration order
    // Atoms of a class rule that index the class's weight vector.
    std::vector<std::string> class_propositions(std::string_view label) const;
};

// Throws LexError, ParseError, ValidationError.
RuleSet parse_ruleset(std::string_view text);

// Checks declared-atom and uniqueness invariants. Throws ValidationError.
void validate(const RuleSet& rules);

// Canonical .ekr text (declarations only; weights are not part of the language).
std::string format_ruleset(const RuleSet& rules);

}  // namespace eksaii::rules
