#include "eksaii/rule_dsl.hpp"

#include "eksaii/dataset.hpp"

#include <algorithm>
#include <set>

namespace eksaii::rules {

std::string_view token_kind_name(TokenKind kind) noexcept
{
    switch (kind) {
    case TokenKind::Ident: return "IDENT";
    case TokenKind::And: return "AND";
    case TokenKind::Or: return "OR";
    case TokenKind::Not: return "NOT";
    case TokenKind::LParen: return "LPAREN";
    case TokenKind::RParen: return "RPAREN";
    case TokenKind::Assign: return "ASSIGN";
    case TokenKind::Keyword: return "KEYWORD";
    case TokenKind::Number: return "NUMBER";
    case TokenKind::String: return "STRING";
    case TokenKind::Comma: return "COMMA";
    case TokenKind::Compare: return "COMPARE";
    case TokenKind::Equals: return "EQUALS";
    case TokenKind::Sign: return "SIGN";
    }
    return "?";
}

namespace {

constexpr std::string_view kKeywords[] = {"prop",    "rule",  "threshold", "sigmoid",
                                          "feature", "center", "scale",     "direction"};

bool is_keyword(std::string_view word)
{
    return std::find(std::begin(kKeywords), std::end(kKeywords), word) != std::end(kKeywords);
}

bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

// Byte length of the UTF-8 sequence starting with `lead` (1 for invalid leads).
std::size_t utf8_length(unsigned char lead)
{
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 1;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (skip_blank(), i_ < text_.size()) out.push_back(next());
        return out;
    }

    SourcePosition here() const { return {line_, col_}; }

private:
    std::string_view text_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;

    char peek(std::size_t ahead = 0) const { return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0'; }

    // Advances one code point.
    void bump()
    {
        if (text_[i_] == '\n') {
            ++line_;
            col_ = 1;
            ++i_;
            return;
        }
        i_ += std::min(utf8_length(static_cast<unsigned char>(text_[i_])), text_.size() - i_);
        ++col_;
    }

    void skip_blank()
    {
        while (i_ < text_.size()) {
            char c = text_[i_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else if (c == '#') {
                while (i_ < text_.size() && text_[i_] != '\n') bump();
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, std::size_t begin, SourcePosition pos) const
    {
        return {kind, std::string(text_.substr(begin, i_ - begin)), pos};
    }

    Token next()
    {
        const auto pos = here();
        const auto begin = i_;
        const char c = peek();
        if (ident_start(c)) {
            while (ident_char(peek())) bump();
            auto tok = make(TokenKind::Ident, begin, pos);
            if (is_keyword(tok.lexeme)) tok.kind = TokenKind::Keyword;
            return tok;
        }
        if (digit(c) || (c == '.' && digit(peek(1))) ||
            ((c == '-' || c == '+') && (digit(peek(1)) || (peek(1) == '.' && digit(peek(2))))))
            return number(begin, pos);
        switch (c) {
        case '&': bump(); return make(TokenKind::And, begin, pos);
        case '|': bump(); return make(TokenKind::Or, begin, pos);
        case '!': bump(); return make(TokenKind::Not, begin, pos);
        case '(': bump(); return make(TokenKind::LParen, begin, pos);
        case ')': bump(); return make(TokenKind::RParen, begin, pos);
        case ',': bump(); return make(TokenKind::Comma, begin, pos);
        case '=': bump(); return make(TokenKind::Equals, begin, pos);
        case '+':
        case '-': bump(); return make(TokenKind::Sign, begin, pos);
        case '<':
        case '>':
            bump();
            if (peek() == '=') bump();
            return make(TokenKind::Compare, begin, pos);
        case ':':
            if (peek(1) == '=') {
                bump();
                bump();
                return make(TokenKind::Assign, begin, pos);
            }
            break;
        case '"': {
            bump();
            while (i_ < text_.size() && peek() != '"' && peek() != '\n') bump();
            if (peek() != '"') throw LexError(pos, "\"");
            bump();
            return make(TokenKind::String, begin, pos);  // lexeme keeps its quotes
        }
        default: break;
        }
        // U+2264 / U+2265
        if (text_.substr(i_, 3) == "\xE2\x89\xA4" || text_.substr(i_, 3) == "\xE2\x89\xA5") {
            bump();
            return make(TokenKind::Compare, begin, pos);
        }
        const auto len = std::min(utf8_length(static_cast<unsigned char>(c)), text_.size() - i_);
        throw LexError(pos, std::string(text_.substr(i_, len)));
    }

    Token number(std::size_t begin, SourcePosition pos)
    {
        if (peek() == '-' || peek() == '+') bump();
        while (digit(peek())) bump();
        if (peek() == '.') {
            bump();
            while (digit(peek())) bump();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && digit(peek(2))))) {
            bump();
            if (peek() == '-' || peek() == '+') bump();
            while (digit(peek())) bump();
        }
        return make(TokenKind::Number, begin, pos);
    }
};

}  // namespace

std::vector<Token> tokenize(std::string_view text)
{
    return Lexer(text).run();
}

// ---------------------------------------------------------------------------
// Expr

ExprPtr Expr::atom(std::string name)
{
    return std::make_shared<const Expr>(Kind::Atom, std::move(name), nullptr, nullptr);
}

ExprPtr Expr::negate(ExprPtr operand)
{
    return std::make_shared<const Expr>(Kind::Not, std::string(), std::move(operand), nullptr);
}

ExprPtr Expr::conj(ExprPtr lhs, ExprPtr rhs)
{
    return std::make_shared<const Expr>(Kind::And, std::string(), std::move(lhs), std::move(rhs));
}

ExprPtr Expr::disj(ExprPtr lhs, ExprPtr rhs)
{
    return std::make_shared<const Expr>(Kind::Or, std::string(), std::move(lhs), std::move(rhs));
}

bool operator==(const Expr& a, const Expr& b)
{
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
    case Expr::Kind::Atom: return a.name_ == b.name_;
    case Expr::Kind::Not: return *a.lhs_ == *b.lhs_;
    default: return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
    }
}

namespace {

void collect_atoms(const Expr& e, std::vector<std::string>& out)
{
    switch (e.kind()) {
    case Expr::Kind::Atom:
        if (std::find(out.begin(), out.end(), e.name()) == out.end()) out.push_back(e.name());
        break;
    case Expr::Kind::Not: collect_atoms(e.operand(), out); break;
    default:
        collect_atoms(e.lhs(), out);
        collect_atoms(e.rhs(), out);
    }
}

int precedence(const Expr& e)
{
    switch (e.kind()) {
    case Expr::Kind::Or: return 1;
    case Expr::Kind::And: return 2;
    case Expr::Kind::Not: return 3;
    case Expr::Kind::Atom: return 4;
    }
    return 0;
}

void format_into(const Expr& e, std::string& out)
{
    auto wrap = [&out](const Expr& sub, bool parens) {
        if (parens) out += '(';
        format_into(sub, out);
        if (parens) out += ')';
    };
    switch (e.kind()) {
    case Expr::Kind::Atom: out += e.name(); break;
    case Expr::Kind::Not:
        out += '!';
        wrap(e.operand(), precedence(e.operand()) < precedence(e));
        break;
    case Expr::Kind::And:
    case Expr::Kind::Or: {
        const int p = precedence(e);
        wrap(e.lhs(), precedence(e.lhs()) < p);
        out += e.kind() == Expr::Kind::And ? " & " : " | ";
        // Left associativity: an equal-precedence right child needs parens.
        wrap(e.rhs(), precedence(e.rhs()) <= p);
        break;
    }
    }
}

}  // namespace

std::vector<std::string> atoms(const Expr& expr)
{
    std::vector<std::string> out;
    collect_atoms(expr, out);
    return out;
}

std::string format_expr(const Expr& expr)
{
    std::string out;
    format_into(expr, out);
    return out;
}

std::string_view compare_op_text(CompareOp op) noexcept
{
    switch (op) {
    case CompareOp::Less: return "<";
    case CompareOp::LessEqual: return "<=";
    case CompareOp::Greater: return ">";
    case CompareOp::GreaterEqual: return ">=";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text))
    {
        // End-of-input position: just past the last character.
        int line = 1, col = 1;
        for (std::size_t i = 0; i < text.size();) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
                ++i;
            } else {
                i += utf8_length(static_cast<unsigned char>(text[i]));
                ++col;
            }
        }
        eof_ = {line, col};
    }

    RuleSet ruleset()
    {
        RuleSet out;
        while (!at_end()) {
            const Token& kw = peek();
            if (kw.kind == TokenKind::Keyword && kw.lexeme == "prop") {
                out.extractors.push_back(prop_decl());
            } else if (kw.kind == TokenKind::Keyword && kw.lexeme == "rule") {
                out.rules.push_back(rule_decl());
            } else {
                fail("'prop' or 'rule'");
            }
        }
        return out;
    }

    ExprPtr bare_expr()
    {
        auto e = expr();
        if (!at_end()) fail("'&', '|' or end of input");
        return e;
    }

private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;
    SourcePosition eof_;

    bool at_end() const { return i_ >= toks_.size(); }
    const Token& peek() const { return toks_[i_]; }

    bool check(TokenKind kind, std::string_view lexeme = {}) const
    {
        return !at_end() && peek().kind == kind && (lexeme.empty() || peek().lexeme == lexeme);
    }

    [[noreturn]] void fail(const std::string& expected) const
    {
        if (at_end()) throw ParseError(eof_, expected, "end of input");
        throw ParseError(peek().position, expected, "'" + peek().lexeme + "'");
    }

    const Token& expect(TokenKind kind, std::string_view lexeme, const std::string& what)
    {
        if (!check(kind, lexeme)) fail(what);
        return toks_[i_++];
    }

    double number()
    {
        const auto& tok = expect(TokenKind::Number, {}, "a number");
        auto v = parse_real(tok.lexeme);
        if (!v) throw ParseError(tok.position, "a finite number", "'" + tok.lexeme + "'");
        return *v;
    }

    ExtractorDecl prop_decl()
    {
        ExtractorDecl d;
        d.position = expect(TokenKind::Keyword, "prop", "'prop'").position;
        d.proposition = expect(TokenKind::Ident, {}, "a proposition name").lexeme;
        expect(TokenKind::Assign, {}, "':='");
        if (check(TokenKind::Keyword, "threshold")) {
            ++i_;
            d.kind = ExtractorDecl::Kind::Threshold;
            d.feature = feature_arg();
            expect(TokenKind::Comma, {}, "','");
            const auto& op = expect(TokenKind::Compare, {}, "a comparison ('<', '<=', '>', '>=')");
            if (op.lexeme == "<") d.op = CompareOp::Less;
            else if (op.lexeme == "<=" || op.lexeme == "\xE2\x89\xA4") d.op = CompareOp::LessEqual;
            else if (op.lexeme == ">") d.op = CompareOp::Greater;
            else d.op = CompareOp::GreaterEqual;
            expect(TokenKind::Comma, {}, "','");
            d.value = number();
            expect(TokenKind::RParen, {}, "')'");
        } else if (check(TokenKind::Keyword, "sigmoid")) {
            ++i_;
            d.kind = ExtractorDecl::Kind::Sigmoid;
            d.feature = feature_arg();
            std::set<std::string> seen;
            while (seen.size() < 3) {
                expect(TokenKind::Comma, {}, "','");
                const auto& key = peek_named_arg(seen);
                expect(TokenKind::Equals, {}, "'='");
                if (key == "center") {
                    d.center = number();
                } else if (key == "scale") {
                    d.scale = number();
                } else {
                    const auto& sign = expect(TokenKind::Sign, {}, "'+' or '-'");
                    d.direction = sign.lexeme == "-" ? -1 : +1;
                }
            }
            expect(TokenKind::RParen, {}, "')'");
        } else {
            fail("'threshold' or 'sigmoid'");
        }
        return d;
    }

    std::string peek_named_arg(std::set<std::string>& seen)
    {
        for (const char* key : {"center", "scale", "direction"}) {
            if (!seen.count(key) && check(TokenKind::Keyword, key)) {
                ++i_;
                seen.insert(key);
                return key;
            }
        }
        std::string expected;
        for (const char* key : {"center", "scale", "direction"})
            if (!seen.count(key)) expected += (expected.empty() ? "'" : " or '") + std::string(key) + "'";
        fail(expected);
    }

    std::string feature_arg()
    {
        expect(TokenKind::LParen, {}, "'('");
        expect(TokenKind::Keyword, "feature", "'feature'");
        const auto& lexeme = expect(TokenKind::String, {}, "a quoted feature name").lexeme;
        return lexeme.substr(1, lexeme.size() - 2);
    }

    ClassRuleDecl rule_decl()
    {
        ClassRuleDecl d;
        d.position = expect(TokenKind::Keyword, "rule", "'rule'").position;
        d.label = expect(TokenKind::Ident, {}, "a class label").lexeme;
        expect(TokenKind::Assign, {}, "':='");
        d.rule = expr();
        if (!at_end() && !check(TokenKind::Keyword, "prop") && !check(TokenKind::Keyword, "rule"))
            fail("'&', '|', 'prop', 'rule' or end of input");
        return d;
    }

    ExprPtr expr()
    {
        auto lhs = conjunction();
        while (check(TokenKind::Or)) {
            ++i_;
            lhs = Expr::disj(lhs, conjunction());
        }
        return lhs;
    }

    ExprPtr conjunction()
    {
        auto lhs = unary();
        while (check(TokenKind::And)) {
            ++i_;
            lhs = Expr::conj(lhs, unary());
        }
        return lhs;
    }

    ExprPtr unary()
    {
        if (check(TokenKind::Not)) {
            ++i_;
            return Expr::negate(unary());
        }
        if (check(TokenKind::LParen)) {
            ++i_;
            auto inner = expr();
            if (!check(TokenKind::RParen)) fail("'&', '|' or ')'");
            ++i_;
            return inner;
        }
        if (check(TokenKind::Ident)) return Expr::atom(toks_[i_++].lexeme);
        fail("a proposition, '!' or '('");
    }
};

}  // namespace

ExprPtr parse_expr(std::string_view text)
{
    return Parser(text).bare_expr();
}

const ExtractorDecl* RuleSet::extractor(std::string_view proposition) const
{
    for (const auto& d : extractors)
        if (d.proposition == proposition) return &d;
    return nullptr;
}

const ClassRuleDecl* RuleSet::rule(std::string_view label) const
{
    for (const auto& r : rules)
        if (r.label == label) return &r;
    return nullptr;
}

std::vector<std::string> RuleSet::class_labels() const
{
    std::vector<std::string> out;
    out.reserve(rules.size());
    for (const auto& r : rules) out.push_back(r.label);
    return out;
}

std::vector<std::string> RuleSet::class_propositions(std::string_view label) const
{
    const auto* r = rule(label);
    if (!r) return {};
    return atoms(*r->rule);
}

void validate(const RuleSet& rs)
{
    std::set<std::string> props;
    for (const auto& d : rs.extractors) {
        if (!props.insert(d.proposition).second)
            throw ValidationError(d.proposition, "proposition declared more than once", d.position);
        if (d.feature.empty()) throw ValidationError(d.proposition, "empty feature name", d.position);
        if (d.kind == ExtractorDecl::Kind::Sigmoid && !(d.scale > 0))
            throw ValidationError(d.proposition, "sigmoid scale must be > 0", d.position);
    }
    std::set<std::string> classes;
    for (const auto& r : rs.rules) {
        if (!classes.insert(r.label).second)
            throw ValidationError(r.label, "class rule declared more than once", r.position);
        for (const auto& a : atoms(*r.rule))
            if (!props.count(a))
                throw ValidationError(a, "undeclared proposition in rule '" + r.label + "'", r.position);
    }
    for (const auto& [label, w] : rs.weights) {
        if (!classes.count(label)) throw ValidationError(label, "weights for an undeclared class");
        const auto expected = rs.class_propositions(label);
        double total = 0;
        for (const auto& [p, v] : w) {
            if (std::find(expected.begin(), expected.end(), p) == expected.end())
                throw ValidationError(p, "weight for a proposition outside rule '" + label + "'");
            if (!(v >= 0)) throw ValidationError(p, "negative weight in class '" + label + "'");
            total += v;
        }
        if (w.size() != expected.size() || std::abs(total - 1.0) > 1e-9)
            throw ValidationError(label, "weights must cover the rule's propositions and sum to 1");
    }
}

RuleSet parse_ruleset(std::string_view text)
{
    auto rs = Parser(text).ruleset();
    validate(rs);
    return rs;
}

std::string format_ruleset(const RuleSet& rs)
{
    std::string out;
    for (const auto& d : rs.extractors) {
        out += "prop " + d.proposition + " := ";
        if (d.kind == ExtractorDecl::Kind::Threshold) {
            out += "threshold(feature \"" + d.feature + "\", " + std::string(compare_op_text(d.op)) + ", " +
                   format_real(d.value) + ")";
        } else {
            out += "sigmoid(feature \"" + d.feature + "\", center=" + format_real(d.center) +
                   ", scale=" + format_real(d.scale) + ", direction=" + (d.direction < 0 ? "-" : "+") + ")";
        }
        out += '\n';
    }
    for (const auto& r : rs.rules) out += "rule " + r.label + " := " + format_expr(*r.rule) + "\n";
    return out;
}

}  // namespace eksaii::rules
