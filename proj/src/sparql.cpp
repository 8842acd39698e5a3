// Copyright 2026 the tabular-obda authors
// SPDX-License-Identifier: Apache-2.0

#include "tabular_obda/sparql.hpp"

#include <algorithm>
#include <cctype>

namespace obda::sparql {

namespace {

const std::set<std::string> kUnsupported = {
    "UNION",  "CONSTRUCT", "DESCRIBE", "ASK",    "GRAPH",  "SERVICE", "MINUS",
    "EXISTS", "BIND",      "VALUES",   "GROUP",  "HAVING", "REDUCED",
};

struct Token {
    enum class Kind { Word, Var, Iri, PName, String, Number, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    double number = 0;
    int line = 0;
    int col = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    const Token& peek() {
        if (!buffered_) {
            next_ = lex();
            buffered_ = true;
        }
        return next_;
    }

    Token take() {
        const Token t = peek();
        buffered_ = false;
        return t;
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) const {
        raise(ErrorKind::Syntax, "query:" + std::to_string(at.line) + ":" +
                                     std::to_string(at.col) + ": " + message);
    }

private:
    Token lex() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= text_.size()) return t;
        char c = text_[pos_];
        if (c == '?' || c == '$') {
            advance();
            t.kind = Token::Kind::Var;
            t.text = take_while([](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
            if (t.text.empty()) fail(t, "empty variable name");
            return t;
        }
        if (c == '<') {
            advance();
            std::string iri;
            while (pos_ < text_.size() && text_[pos_] != '>') {
                iri.push_back(text_[pos_]);
                advance();
            }
            if (pos_ >= text_.size()) fail(t, "unterminated IRI");
            advance();
            t.kind = Token::Kind::Iri;
            t.text = iri;
            return t;
        }
        if (c == '"') {
            advance();
            std::string s;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                char ch = text_[pos_];
                if (ch == '\\' && pos_ + 1 < text_.size()) {
                    advance();
                    char esc = text_[pos_];
                    switch (esc) {
                        case 'n': s.push_back('\n'); break;
                        case 't': s.push_back('\t'); break;
                        case '\\': s.push_back('\\'); break;
                        case '"': s.push_back('"'); break;
                        default: s.push_back(esc); break;
                    }
                } else {
                    s.push_back(ch);
                }
                advance();
            }
            if (pos_ >= text_.size()) fail(t, "unterminated string literal");
            advance();
            t.kind = Token::Kind::String;
            t.text = s;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '+') && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) && numeric_context_)) {
            std::string num;
            if (c == '-' || c == '+') {
                num.push_back(c);
                advance();
            }
            num += take_while([](char ch) {
                return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.';
            });
            t.kind = Token::Kind::Number;
            t.text = num;
            t.number = std::stod(num);
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word = take_while([](char ch) {
                return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ||
                       ch == '.' || ch == ':';
            });
            while (!word.empty() && word.back() == '.') {
                word.pop_back();
                --pos_;
                --col_;
            }
            if (word.find(':') != std::string::npos) {
                t.kind = Token::Kind::PName;
            } else {
                t.kind = Token::Kind::Word;
            }
            t.text = word;
            return t;
        }
        // multi-char operators
        static const std::vector<std::string> two = {"<=", ">=", "!=", "&&", "||", "^^"};
        for (const auto& op : two) {
            if (text_.compare(pos_, 2, op) == 0) {
                t.kind = Token::Kind::Punct;
                t.text = op;
                advance();
                advance();
                return t;
            }
        }
        t.kind = Token::Kind::Punct;
        t.text = std::string(1, c);
        advance();
        return t;
    }

    template <typename Pred>
    std::string take_while(Pred pred) {
        std::string out;
        while (pos_ < text_.size() && pred(text_[pos_])) {
            out.push_back(text_[pos_]);
            advance();
        }
        return out;
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

public:
    // Signed numbers only lex as such inside FILTER expressions; outside,
    // '-' would swallow template-ish text.
    bool numeric_context_ = false;

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token next_;
    bool buffered_ = false;
};

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    Query parse() {
        parse_prologue();
        expect_keyword("SELECT");
        Query q;
        if (peek_keyword("DISTINCT")) {
            lex_.take();
            q.distinct = true;
        }
        if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "*") {
            lex_.take();
            q.select_all = true;
        } else {
            while (lex_.peek().kind == Token::Kind::Var) q.projected_vars.push_back(lex_.take().text);
            if (q.projected_vars.empty()) lex_.fail(lex_.peek(), "expected projection variables or *");
        }
        if (peek_keyword("WHERE")) lex_.take();
        expect_punct("{");
        parse_group(q);
        expect_punct("}");
        parse_modifiers(q);
        const auto& trailing = lex_.peek();
        if (trailing.kind != Token::Kind::End)
            lex_.fail(trailing, "unexpected trailing input '" + trailing.text + "'");
        check_projection(q);
        return q;
    }

private:
    void parse_prologue() {
        while (peek_keyword("PREFIX") || peek_keyword("BASE")) {
            if (peek_keyword("BASE")) raise(ErrorKind::UnsupportedFeature, "BASE");
            lex_.take();
            auto name = lex_.take();
            std::string pfx = name.text;
            if (name.kind == Token::Kind::PName) {
                if (pfx.back() != ':') lex_.fail(name, "prefix name must end with ':'");
                pfx.pop_back();
            } else if (name.kind == Token::Kind::Punct && name.text == ":") {
                pfx = "";
            } else {
                lex_.fail(name, "expected prefix name");
            }
            auto iri = lex_.take();
            if (iri.kind != Token::Kind::Iri) lex_.fail(iri, "expected IRI after prefix name");
            prefixes_[pfx] = iri.text;
        }
    }

    void parse_group(Query& q) {
        while (true) {
            const auto& t = lex_.peek();
            if (t.kind == Token::Kind::Punct && t.text == "}") return;
            if (t.kind == Token::Kind::End) lex_.fail(t, "unterminated group, expected '}'");
            if (t.kind == Token::Kind::Word) {
                std::string kw = upper(t.text);
                if (kUnsupported.count(kw)) raise(ErrorKind::UnsupportedFeature, kw);
                if (kw == "OPTIONAL") {
                    lex_.take();
                    expect_punct("{");
                    std::vector<TriplePattern> block;
                    while (!(lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "}")) {
                        const auto& inner = lex_.peek();
                        if (inner.kind == Token::Kind::Word) {
                            std::string ikw = upper(inner.text);
                            if (ikw == "OPTIONAL")
                                raise(ErrorKind::UnsupportedFeature, "nested OPTIONAL");
                            if (ikw == "FILTER")
                                raise(ErrorKind::UnsupportedFeature, "FILTER inside OPTIONAL");
                            if (kUnsupported.count(ikw)) raise(ErrorKind::UnsupportedFeature, ikw);
                        }
                        parse_triples_same_subject(block, true);
                        consume_dot();
                    }
                    expect_punct("}");
                    for (auto& p : block) p.optional = true;
                    if (!block.empty()) q.optionals.push_back(std::move(block));
                    consume_dot();
                    continue;
                }
                if (kw == "FILTER") {
                    lex_.take();
                    expect_punct("(");
                    lex_.numeric_context_ = true;
                    q.filters.push_back(parse_or());
                    lex_.numeric_context_ = false;
                    expect_punct(")");
                    consume_dot();
                    continue;
                }
            }
            parse_triples_same_subject(q.bgp, false);
            consume_dot();
        }
    }

    void parse_triples_same_subject(std::vector<TriplePattern>& out, bool optional) {
        Term subject = parse_term(/*allow_literal=*/false);
        while (true) {
            Term predicate = parse_predicate();
            while (true) {
                Term object = parse_term(/*allow_literal=*/true);
                TriplePattern tp;
                tp.subject = subject;
                tp.predicate = predicate;
                tp.object = object;
                tp.optional = optional;
                out.push_back(tp);
                if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ",") {
                    lex_.take();
                    continue;
                }
                break;
            }
            if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ";") {
                lex_.take();
                // allow trailing ';' before '.' or '}'
                if (lex_.peek().kind == Token::Kind::Punct &&
                    (lex_.peek().text == "." || lex_.peek().text == "}"))
                    break;
                continue;
            }
            break;
        }
    }

    Term parse_predicate() {
        const auto& t = lex_.peek();
        if (t.kind == Token::Kind::Var)
            raise(ErrorKind::UnsupportedFeature,
                  "variable predicate ?" + t.text + " (predicates must be bounded)");
        if (t.kind == Token::Kind::Word && t.text == "a") {
            lex_.take();
            return Term{Term::Kind::Iri, kRdfType, std::nullopt, false};
        }
        if (t.kind == Token::Kind::Punct && (t.text == "/" || t.text == "^" || t.text == "|"))
            raise(ErrorKind::UnsupportedFeature, "property path");
        Term term = parse_term(false);
        if (term.kind != Term::Kind::Iri) lex_.fail(t, "predicate must be an IRI");
        return term;
    }

    Term parse_term(bool allow_literal) {
        auto t = lex_.take();
        switch (t.kind) {
            case Token::Kind::Var:
                return Term{Term::Kind::Variable, t.text, std::nullopt, false};
            case Token::Kind::Iri:
                return Term{Term::Kind::Iri, t.text, std::nullopt, false};
            case Token::Kind::PName:
                return Term{Term::Kind::Iri, expand(t), std::nullopt, false};
            case Token::Kind::String: {
                if (!allow_literal) lex_.fail(t, "literal not allowed here");
                Term term{Term::Kind::Literal, t.text, std::nullopt, false};
                if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "^^") {
                    lex_.take();
                    auto dt = lex_.take();
                    if (dt.kind == Token::Kind::Iri) term.datatype = dt.text;
                    else if (dt.kind == Token::Kind::PName) term.datatype = expand(dt);
                    else lex_.fail(dt, "expected datatype IRI after ^^");
                }
                if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "@")
                    raise(ErrorKind::UnsupportedFeature, "language tag");
                return term;
            }
            case Token::Kind::Number: {
                if (!allow_literal) lex_.fail(t, "number not allowed here");
                Term term{Term::Kind::Literal, t.text, std::nullopt, true};
                return term;
            }
            case Token::Kind::Word: {
                std::string kw = upper(t.text);
                if (kUnsupported.count(kw)) raise(ErrorKind::UnsupportedFeature, kw);
                if (kw == "TRUE" || kw == "FALSE") {
                    Term term{Term::Kind::Literal, kw == "TRUE" ? "true" : "false", std::nullopt, false};
                    return term;
                }
                lex_.fail(t, "unexpected word '" + t.text + "'");
            }
            default:
                lex_.fail(t, "unexpected token '" + t.text + "'");
        }
    }

    std::string expand(const Token& pname) {
        auto colon = pname.text.find(':');
        std::string pfx = pname.text.substr(0, colon);
        std::string local = pname.text.substr(colon + 1);
        auto it = prefixes_.find(pfx);
        if (it == prefixes_.end()) lex_.fail(pname, "unknown prefix '" + pfx + ":'");
        return it->second + local;
    }

    // FILTER expression grammar, loosest binding first.
    FilterExpr parse_or() {
        FilterExpr left = parse_and();
        while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "||") {
            lex_.take();
            FilterExpr node;
            node.op = FilterExpr::Op::Or;
            node.children = {std::move(left), parse_and()};
            left = std::move(node);
        }
        return left;
    }

    FilterExpr parse_and() {
        FilterExpr left = parse_comparison();
        while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "&&") {
            lex_.take();
            FilterExpr node;
            node.op = FilterExpr::Op::And;
            node.children = {std::move(left), parse_comparison()};
            left = std::move(node);
        }
        return left;
    }

    FilterExpr parse_comparison() {
        FilterExpr left = parse_additive();
        const auto& t = lex_.peek();
        if (t.kind == Token::Kind::Punct) {
            FilterExpr::Op op;
            if (t.text == "=") op = FilterExpr::Op::Eq;
            else if (t.text == "!=") op = FilterExpr::Op::Ne;
            else if (t.text == "<") op = FilterExpr::Op::Lt;
            else if (t.text == "<=") op = FilterExpr::Op::Le;
            else if (t.text == ">") op = FilterExpr::Op::Gt;
            else if (t.text == ">=") op = FilterExpr::Op::Ge;
            else return left;
            lex_.take();
            FilterExpr node;
            node.op = op;
            node.children = {std::move(left), parse_additive()};
            return node;
        }
        return left;
    }

    FilterExpr parse_additive() {
        FilterExpr left = parse_multiplicative();
        while (lex_.peek().kind == Token::Kind::Punct &&
               (lex_.peek().text == "+" || lex_.peek().text == "-")) {
            auto op = lex_.take().text == "+" ? FilterExpr::Op::Add : FilterExpr::Op::Sub;
            FilterExpr node;
            node.op = op;
            node.children = {std::move(left), parse_multiplicative()};
            left = std::move(node);
        }
        return left;
    }

    FilterExpr parse_multiplicative() {
        FilterExpr left = parse_unary();
        while (lex_.peek().kind == Token::Kind::Punct &&
               (lex_.peek().text == "*" || lex_.peek().text == "/")) {
            auto op = lex_.take().text == "*" ? FilterExpr::Op::Mul : FilterExpr::Op::Div;
            FilterExpr node;
            node.op = op;
            node.children = {std::move(left), parse_unary()};
            left = std::move(node);
        }
        return left;
    }

    FilterExpr parse_unary() {
        const auto& t = lex_.peek();
        if (t.kind == Token::Kind::Punct && t.text == "!") {
            lex_.take();
            FilterExpr node;
            node.op = FilterExpr::Op::Not;
            node.children = {parse_unary()};
            return node;
        }
        if (t.kind == Token::Kind::Punct && t.text == "-") {
            lex_.take();
            FilterExpr node;
            node.op = FilterExpr::Op::Neg;
            node.children = {parse_unary()};
            return node;
        }
        return parse_primary();
    }

    FilterExpr parse_primary() {
        auto t = lex_.take();
        FilterExpr node;
        switch (t.kind) {
            case Token::Kind::Punct:
                if (t.text == "(") {
                    node = parse_or();
                    expect_punct(")");
                    return node;
                }
                lex_.fail(t, "unexpected '" + t.text + "' in FILTER");
            case Token::Kind::Var:
                node.op = FilterExpr::Op::Var;
                node.text = t.text;
                return node;
            case Token::Kind::String:
                node.op = FilterExpr::Op::StringLit;
                node.text = t.text;
                if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "^^") {
                    lex_.take();
                    lex_.take();  // datatype carried by comparison typing, not the node
                }
                return node;
            case Token::Kind::Number:
                node.op = FilterExpr::Op::NumberLit;
                node.number = t.number;
                node.text = t.text;
                return node;
            case Token::Kind::Word: {
                std::string kw = upper(t.text);
                if (kw == "TRUE" || kw == "FALSE") {
                    node.op = FilterExpr::Op::BoolLit;
                    node.boolean = kw == "TRUE";
                    return node;
                }
                if (kUnsupported.count(kw) || kw == "REGEX" || kw == "BOUND" || kw == "LANG" ||
                    kw == "STR" || kw == "NOT")
                    raise(ErrorKind::UnsupportedFeature, kw);
                lex_.fail(t, "unexpected word '" + t.text + "' in FILTER");
            }
            default:
                lex_.fail(t, "unexpected token in FILTER");
        }
    }

    void parse_modifiers(Query& q) {
        while (true) {
            if (peek_keyword("ORDER")) {
                lex_.take();
                expect_keyword("BY");
                while (true) {
                    const auto& t = lex_.peek();
                    if (t.kind == Token::Kind::Var) {
                        q.order_by.push_back({lex_.take().text, true});
                    } else if (t.kind == Token::Kind::Word &&
                               (upper(t.text) == "ASC" || upper(t.text) == "DESC")) {
                        bool asc = upper(lex_.take().text) == "ASC";
                        expect_punct("(");
                        auto v = lex_.take();
                        if (v.kind != Token::Kind::Var) lex_.fail(v, "expected variable in ORDER BY");
                        expect_punct(")");
                        q.order_by.push_back({v.text, asc});
                    } else {
                        break;
                    }
                }
                if (q.order_by.empty()) lex_.fail(lex_.peek(), "empty ORDER BY");
                continue;
            }
            if (peek_keyword("LIMIT")) {
                lex_.take();
                auto n = lex_.take();
                if (n.kind != Token::Kind::Number) lex_.fail(n, "expected number after LIMIT");
                q.limit = static_cast<long>(n.number);
                continue;
            }
            if (peek_keyword("OFFSET")) {
                lex_.take();
                auto n = lex_.take();
                if (n.kind != Token::Kind::Number) lex_.fail(n, "expected number after OFFSET");
                q.offset = static_cast<long>(n.number);
                continue;
            }
            const auto& t = lex_.peek();
            if (t.kind == Token::Kind::Word && kUnsupported.count(upper(t.text)))
                raise(ErrorKind::UnsupportedFeature, upper(t.text));
            return;
        }
    }

    void check_projection(const Query& q) {
        auto bound = q.variables_in_order();
        for (const auto& v : q.projected_vars)
            if (std::find(bound.begin(), bound.end(), v) == bound.end())
                raise(ErrorKind::Syntax, "projected variable ?" + v + " is not bound by any pattern");
        for (const auto& k : q.order_by)
            if (std::find(bound.begin(), bound.end(), k.variable) == bound.end())
                raise(ErrorKind::Syntax, "ORDER BY variable ?" + k.variable + " is not bound");
        for (const auto& f : q.filters)
            for (const auto& v : f.variables())
                if (std::find(bound.begin(), bound.end(), v) == bound.end())
                    raise(ErrorKind::Syntax, "FILTER variable ?" + v + " is not bound");
    }

    bool peek_keyword(const char* kw) {
        const auto& t = lex_.peek();
        return t.kind == Token::Kind::Word && upper(t.text) == kw;
    }

    void expect_keyword(const char* kw) {
        auto t = lex_.take();
        if (t.kind != Token::Kind::Word || upper(t.text) != kw) {
            if (t.kind == Token::Kind::Word && kUnsupported.count(upper(t.text)))
                raise(ErrorKind::UnsupportedFeature, upper(t.text));
            lex_.fail(t, std::string("expected ") + kw);
        }
    }

    void expect_punct(const char* p) {
        auto t = lex_.take();
        if (t.kind != Token::Kind::Punct || t.text != p)
            lex_.fail(t, std::string("expected '") + p + "', found '" + t.text + "'");
    }

    void consume_dot() {
        if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ".") lex_.take();
    }

    Lexer lex_;
    std::map<std::string, std::string> prefixes_;
};

void collect_vars(const Term& t, std::vector<std::string>& out) {
    if (t.kind == Term::Kind::Variable &&
        std::find(out.begin(), out.end(), t.value) == out.end())
        out.push_back(t.value);
}

}  // namespace

std::set<std::string> FilterExpr::variables() const {
    std::set<std::string> out;
    if (op == Op::Var) out.insert(text);
    for (const auto& c : children) {
        auto sub = c.variables();
        out.insert(sub.begin(), sub.end());
    }
    return out;
}

std::vector<std::string> Query::variables_in_order() const {
    std::vector<std::string> out;
    for (const auto& p : bgp) {
        collect_vars(p.subject, out);
        collect_vars(p.object, out);
    }
    for (const auto& block : optionals)
        for (const auto& p : block) {
            collect_vars(p.subject, out);
            collect_vars(p.object, out);
        }
    return out;
}

std::vector<std::string> Query::projection() const {
    return select_all ? variables_in_order() : projected_vars;
}

Query parse_query(const std::string& text) { return Parser(text).parse(); }

SsgSet build_ssgs(const Query& q) {
    SsgSet set;
    auto add = [&set](const TriplePattern& p) {
        Ssg* group = nullptr;
        for (auto& g : set.groups)
            if (g.subject == p.subject) group = &g;
        if (!group) {
            set.groups.push_back({});
            group = &set.groups.back();
            group->subject = p.subject;
        }
        group->patterns.push_back(p);
        group->predicates.insert(p.predicate.value);
        if (!p.optional) {
            group->required_predicates.insert(p.predicate.value);
            if (p.predicate.value == kRdfType && p.object.kind == Term::Kind::Iri)
                group->required_class = p.object.value;
        }
    };
    for (const auto& p : q.bgp) add(p);
    for (const auto& block : q.optionals)
        for (const auto& p : block) add(p);
    return set;
}

const Ssg* SsgSet::group_for(const Term& subject) const {
    for (const auto& g : groups)
        if (g.subject == subject) return &g;
    return nullptr;
}

}  // namespace obda::sparql
