#include "flowmut/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "flowmut/validate.hpp"

namespace flowmut {

namespace {

enum class Tok {
    End,
    Newline,
    Ident,
    IntLit,
    FloatLit,
    StrLit,
    // punctuation / operators
    LParen,
    RParen,
    Comma,
    Colon,
    Assign,   // =
    Dot,
    Arrow,    // ->
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    Ne,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    AndAnd,
    OrOr,
    Bang,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t int_val = 0;
    double float_val = 0.0;
    SourceSpan span;
};

class Lexer {
public:
    Lexer(const std::string& src, const std::string& file) : src_(src), file_(file) {}

    // Tokenizes the whole input; collapses comment-only/blank lines.
    std::vector<Token> run(std::vector<ParseDiagnostic>& diags) {
        std::vector<Token> out;
        bool line_has_tokens = false;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                if (line_has_tokens) out.push_back(make(Tok::Newline, 1));
                advance();
                line_has_tokens = false;
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                continue;
            }
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                continue;
            }
            Token t = next(diags);
            if (t.kind == Tok::End) break;  // lexical error already reported
            out.push_back(t);
            line_has_tokens = true;
        }
        if (line_has_tokens) out.push_back(make(Tok::Newline, 0));
        out.push_back(make(Tok::End, 0));
        return out;
    }

private:
    Token next(std::vector<ParseDiagnostic>& diags) {
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        if (std::isdigit(static_cast<unsigned char>(c))) return number(diags);
        if (c == '"') return string_lit(diags);

        SourceSpan sp = span_here(1);
        auto two = [&](char a, char b) {
            return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
        };
        if (two('-', '>')) return punct(Tok::Arrow, 2);
        if (two('=', '=')) return punct(Tok::EqEq, 2);
        if (two('!', '=')) return punct(Tok::Ne, 2);
        if (two('<', '=')) return punct(Tok::Le, 2);
        if (two('>', '=')) return punct(Tok::Ge, 2);
        if (two('&', '&')) return punct(Tok::AndAnd, 2);
        if (two('|', '|')) return punct(Tok::OrOr, 2);
        switch (c) {
        case '(': return punct(Tok::LParen, 1);
        case ')': return punct(Tok::RParen, 1);
        case ',': return punct(Tok::Comma, 1);
        case ':': return punct(Tok::Colon, 1);
        case '=': return punct(Tok::Assign, 1);
        case '.': return punct(Tok::Dot, 1);
        case '<': return punct(Tok::Lt, 1);
        case '>': return punct(Tok::Gt, 1);
        case '+': return punct(Tok::Plus, 1);
        case '-': return punct(Tok::Minus, 1);
        case '*': return punct(Tok::Star, 1);
        case '/': return punct(Tok::Slash, 1);
        case '%': return punct(Tok::Percent, 1);
        case '!': return punct(Tok::Bang, 1);
        default:
            diags.push_back({DiagnosticCode::Lexical, Severity::Error,
                             std::string("unexpected character '") + c + "'", sp});
            advance();
            return next_or_end(diags);
        }
    }

    Token next_or_end(std::vector<ParseDiagnostic>&) {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n' || c == ' ' || c == '\t' || c == '\r' || c == '#') break;
            advance();
        }
        Token t = make(Tok::End, 0);
        return t;
    }

    Token ident() {
        SourceSpan sp = span_here(0);
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            advance();
        Token t;
        t.kind = Tok::Ident;
        t.text = src_.substr(start, pos_ - start);
        sp.length = static_cast<int>(t.text.size());
        t.span = sp;
        return t;
    }

    Token number(std::vector<ParseDiagnostic>& diags) {
        SourceSpan sp = span_here(0);
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        bool is_float = false;
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            is_float = true;
            advance();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        }
        if (is_float && pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    advance();
            } else {
                pos_ = save;  // bare 'e' belongs to the next token
            }
        }
        std::string text = src_.substr(start, pos_ - start);
        sp.length = static_cast<int>(text.size());
        Token t;
        t.text = text;
        t.span = sp;
        if (is_float) {
            t.kind = Tok::FloatLit;
            t.float_val = std::strtod(text.c_str(), nullptr);
        } else {
            t.kind = Tok::IntLit;
            errno = 0;
            char* end = nullptr;
            long long v = std::strtoll(text.c_str(), &end, 10);
            if (errno == ERANGE || end != text.c_str() + text.size()) {
                diags.push_back({DiagnosticCode::Lexical, Severity::Error,
                                 "integer literal overflows 64 bits", sp});
                v = 0;
            }
            t.int_val = v;
        }
        return t;
    }

    Token string_lit(std::vector<ParseDiagnostic>& diags) {
        SourceSpan sp = span_here(0);
        advance();  // opening quote
        std::string value;
        while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
            char c = src_[pos_];
            if (c == '\\') {
                advance();
                if (pos_ >= src_.size()) break;
                char e = src_[pos_];
                switch (e) {
                case '"': value += '"'; break;
                case '\\': value += '\\'; break;
                case 'n': value += '\n'; break;
                case 't': value += '\t'; break;
                default:
                    diags.push_back({DiagnosticCode::Lexical, Severity::Error,
                                     std::string("unknown string escape '\\") + e + "'",
                                     span_here(2)});
                    break;
                }
                advance();
            } else {
                value += c;
                advance();
            }
        }
        if (pos_ >= src_.size() || src_[pos_] != '"') {
            diags.push_back({DiagnosticCode::Lexical, Severity::Error,
                             "unterminated string literal", sp});
        } else {
            advance();  // closing quote
        }
        Token t;
        t.kind = Tok::StrLit;
        t.text = value;
        sp.length = static_cast<int>(col_ - sp.column);
        t.span = sp;
        return t;
    }

    Token punct(Tok k, int len) {
        Token t;
        t.kind = k;
        t.span = span_here(len);
        for (int i = 0; i < len; ++i) advance();
        return t;
    }

    Token make(Tok k, int len) {
        Token t;
        t.kind = k;
        t.span = span_here(len);
        return t;
    }

    SourceSpan span_here(int len) const { return {file_, line_, col_, len}; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& src_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct ParseError {};  // unwinds to the statement level

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<ParseDiagnostic>& diags)
        : toks_(std::move(toks)), diags_(diags) {}

    std::vector<ProgramGraph> parse_file() {
        std::vector<ProgramGraph> programs;
        skip_newlines();
        while (!at(Tok::End)) {
            if (at_keyword("program")) {
                programs.push_back(parse_program_block());
            } else {
                error_here(DiagnosticCode::Syntax, "expected 'program' header");
                recover_to_line_end();
                skip_newlines();
            }
        }
        return programs;
    }

private:
    // ---- program structure -------------------------------------------

    ProgramGraph parse_program_block() {
        ProgramGraph g;
        expect_keyword("program");
        g.name = expect(Tok::Ident, "program name").text;
        expect_line_end();

        bool saw_output = false;
        while (!at(Tok::End) && !at_keyword("program")) {
            skip_newlines();
            if (at(Tok::End) || at_keyword("program")) break;
            try {
                if (at_keyword("input")) {
                    parse_input_decl(g);
                } else if (at_keyword("output")) {
                    parse_output_decl(g);
                    saw_output = true;
                } else if (at(Tok::Ident)) {
                    parse_step(g);
                } else {
                    error_here(DiagnosticCode::Syntax, "expected input, output or pipeline step");
                    throw ParseError{};
                }
            } catch (const ParseError&) {
                recover_to_line_end();
            }
        }
        if (!saw_output)
            diags_.push_back({DiagnosticCode::Syntax, Severity::Error,
                              "program '" + g.name + "' declares no output", cur().span});
        return g;
    }

    void parse_input_decl(ProgramGraph& g) {
        expect_keyword("input");
        Token name = expect(Tok::Ident, "input dataset name");
        expect(Tok::Colon, "':'");
        SourceSpan type_span = cur().span;
        ValueType decl = parse_type();
        expect_line_end();
        // `list<elem>` wrapper denotes "dataset of elem"
        if (!decl.is_list()) {
            diags_.push_back({DiagnosticCode::Type, Severity::Error,
                              "input type must be list<...> (a dataset of elements)", type_span});
            throw ParseError{};
        }
        define_dataset(g, name, decl.elem(), /*is_input=*/true);
    }

    void parse_output_decl(ProgramGraph& g) {
        expect_keyword("output");
        for (;;) {
            Token name = expect(Tok::Ident, "output dataset name");
            const DatasetNode* d = g.find_dataset_by_name(name.text);
            if (!d) {
                diags_.push_back({DiagnosticCode::UnknownIdentifier, Severity::Error,
                                  "unknown dataset '" + name.text + "'", name.span});
                throw ParseError{};
            }
            for (const auto& o : g.outputs)
                if (o.name == name.text)
                    diags_.push_back({DiagnosticCode::Syntax, Severity::Error,
                                      "duplicate output '" + name.text + "'", name.span});
            g.outputs.push_back({name.text, d->id});
            if (!accept(Tok::Comma)) break;
        }
        expect_line_end();
    }

    void parse_step(ProgramGraph& g) {
        Token out_name = expect(Tok::Ident, "dataset name");
        SourceSpan stmt_span = out_name.span;
        expect(Tok::Assign, "'='");
        Token in_name = expect(Tok::Ident, "source dataset name");
        const DatasetNode* in = g.find_dataset_by_name(in_name.text);
        if (!in) {
            diags_.push_back({DiagnosticCode::UnknownIdentifier, Severity::Error,
                              "unknown dataset '" + in_name.text + "'", in_name.span});
            throw ParseError{};
        }
        expect(Tok::Dot, "'.'");
        Token kind_tok = expect(Tok::Ident, "transformation name");
        auto kind = kind_from_name(kind_tok.text);
        if (!kind) {
            diags_.push_back({DiagnosticCode::Syntax, Severity::Error,
                              "unknown transformation '" + kind_tok.text + "'", kind_tok.span});
            throw ParseError{};
        }
        expect(Tok::LParen, "'('");

        Transformation t;
        t.id = static_cast<int>(g.transformations.size());
        t.kind = *kind;
        t.inputs.push_back(in->id);
        t.span = stmt_span;

        if (is_binary(*kind)) {
            Token rhs = expect(Tok::Ident, "second dataset name");
            const DatasetNode* r = g.find_dataset_by_name(rhs.text);
            if (!r) {
                diags_.push_back({DiagnosticCode::UnknownIdentifier, Severity::Error,
                                  "unknown dataset '" + rhs.text + "'", rhs.span});
                throw ParseError{};
            }
            t.inputs.push_back(r->id);
        } else if (*kind == TransformationKind::SortBy) {
            t.udfs.push_back(Udf{parse_lambda(sortby_param_types(*in), 1, kind_tok.span), {}});
            expect(Tok::Comma, "','");
            t.ascending = parse_order_flag();
        } else if (*kind == TransformationKind::SortByKey) {
            t.ascending = parse_order_flag();
        } else if (udf_count(*kind) == 1) {
            int params = *kind == TransformationKind::ReduceByKey ? 2 : 1;
            std::vector<ValueType> ptypes;
            if (params == 2) {
                if (!in->elem.is_pair()) {
                    diags_.push_back({DiagnosticCode::Type, Severity::Error,
                                      "reduceByKey requires a dataset of pairs", kind_tok.span});
                    throw ParseError{};
                }
                ptypes = {in->elem.value(), in->elem.value()};
            } else {
                ptypes = {in->elem};
            }
            t.udfs.push_back(Udf{parse_lambda(ptypes, params, kind_tok.span), {}});
        }
        expect(Tok::RParen, "')'");
        expect_line_end();

        std::vector<ValueType> in_types;
        for (int id : t.inputs) in_types.push_back(g.dataset(id).elem);
        std::string err;
        auto out_type = infer_output_type(t.kind, in_types, t.udfs, &err);
        if (!out_type) {
            diags_.push_back({DiagnosticCode::Type, Severity::Error, err, kind_tok.span});
            throw ParseError{};
        }
        int out_id = define_dataset(g, out_name, *out_type, /*is_input=*/false);
        t.output = out_id;
        g.transformations.push_back(std::move(t));
    }

    std::vector<ValueType> sortby_param_types(const DatasetNode& in) { return {in.elem}; }

    bool parse_order_flag() {
        Token t = expect(Tok::Ident, "'asc' or 'desc'");
        if (t.text == "asc") return true;
        if (t.text == "desc") return false;
        diags_.push_back({DiagnosticCode::Syntax, Severity::Error,
                          "expected 'asc' or 'desc', got '" + t.text + "'", t.span});
        throw ParseError{};
    }

    int define_dataset(ProgramGraph& g, const Token& name, ValueType elem, bool is_input) {
        if (is_reserved(name.text)) {
            diags_.push_back({DiagnosticCode::Syntax, Severity::Error,
                              "'" + name.text + "' is a reserved word", name.span});
            throw ParseError{};
        }
        if (g.find_dataset_by_name(name.text)) {
            diags_.push_back({DiagnosticCode::Syntax, Severity::Error,
                              "dataset '" + name.text + "' is already defined", name.span});
            throw ParseError{};
        }
        DatasetNode d;
        d.id = g.next_dataset_id();
        d.name = name.text;
        d.elem = std::move(elem);
        g.datasets.push_back(d);
        if (is_input) g.input_ids.push_back(d.id);
        return d.id;
    }

    // ---- types ---------------------------------------------------------

    ValueType parse_type() {
        Token t = cur();
        if (accept(Tok::LParen)) {
            ValueType k = parse_type();
            expect(Tok::Comma, "','");
            ValueType v = parse_type();
            expect(Tok::RParen, "')'");
            return ValueType::pair_type(std::move(k), std::move(v));
        }
        Token name = expect(Tok::Ident, "type name");
        if (name.text == "int") return ValueType::int_type();
        if (name.text == "float") return ValueType::float_type();
        if (name.text == "bool") return ValueType::bool_type();
        if (name.text == "string") return ValueType::str_type();
        if (name.text == "list") {
            expect(Tok::Lt, "'<'");
            ValueType e = parse_type();
            expect(Tok::Gt, "'>'");
            return ValueType::list_type(std::move(e));
        }
        diags_.push_back({DiagnosticCode::Syntax, Severity::Error,
                          "unknown type '" + name.text + "'", t.span});
        throw ParseError{};
    }

    // ---- lambdas and expressions ----------------------------------------

    Lambda parse_lambda(const std::vector<ValueType>& param_types, int expected_params,
                        const SourceSpan& where) {
        Lambda l;
        if (accept(Tok::LParen)) {
            for (;;) {
                Token p = expect(Tok::Ident, "parameter name");
                l.params.push_back(p.text);
                if (!accept(Tok::Comma)) break;
            }
            expect(Tok::RParen, "')'");
        } else {
            Token p = expect(Tok::Ident, "parameter name");
            l.params.push_back(p.text);
        }
        if (static_cast<int>(l.params.size()) != expected_params) {
            diags_.push_back({DiagnosticCode::Type, Severity::Error,
                              "udf takes " + std::to_string(expected_params) + " parameter(s), got " +
                                  std::to_string(l.params.size()),
                              where});
            throw ParseError{};
        }
        l.param_types = param_types;
        expect(Tok::Arrow, "'->'");

        params_ = &l;
        l.body = parse_expr();
        params_ = nullptr;
        l.result_type = l.body->result_type;
        return l;
    }

    ExprPtr parse_expr() {
        if (at_keyword("if")) return parse_if();
        return parse_or();
    }

    ExprPtr parse_if() {
        SourceSpan sp = cur().span;
        expect_keyword("if");
        ExprPtr cond = parse_expr();
        require_type(*cond, ValueType::bool_type(), "if condition must be bool");
        expect_keyword("then");
        ExprPtr a = parse_expr();
        expect_keyword("else");
        ExprPtr b = parse_expr();
        if (a->result_type != b->result_type)
            type_error(sp, "if branches have different types " + a->result_type.to_string() +
                               " and " + b->result_type.to_string());
        auto e = std::make_shared<UdfExpr>();
        e->node = UdfExpr::Node::If;
        e->a = cond;
        e->b = a;
        e->c = b;
        e->result_type = a->result_type;
        e->span = sp;
        return e;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::OrOr)) {
            Token op = take();
            ExprPtr rhs = parse_and();
            lhs = make_bool_binop(BinaryOp::Or, lhs, rhs, op.span);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_equality();
        while (at(Tok::AndAnd)) {
            Token op = take();
            ExprPtr rhs = parse_equality();
            lhs = make_bool_binop(BinaryOp::And, lhs, rhs, op.span);
        }
        return lhs;
    }

    ExprPtr parse_equality() {
        ExprPtr lhs = parse_relational();
        while (at(Tok::EqEq) || at(Tok::Ne)) {
            Token op = take();
            ExprPtr rhs = parse_relational();
            if (lhs->result_type != rhs->result_type)
                type_error(op.span, "comparison requires operands of one type, got " +
                                        lhs->result_type.to_string() + " and " +
                                        rhs->result_type.to_string());
            lhs = make_binop(op.kind == Tok::EqEq ? BinaryOp::Eq : BinaryOp::Ne, lhs, rhs,
                             ValueType::bool_type(), op.span);
        }
        return lhs;
    }

    ExprPtr parse_relational() {
        ExprPtr lhs = parse_additive();
        while (at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
            Token op = take();
            ExprPtr rhs = parse_additive();
            if (lhs->result_type != rhs->result_type || !lhs->result_type.is_orderable())
                type_error(op.span, "ordering comparison requires matching orderable operands");
            BinaryOp b = op.kind == Tok::Lt   ? BinaryOp::Lt
                         : op.kind == Tok::Le ? BinaryOp::Le
                         : op.kind == Tok::Gt ? BinaryOp::Gt
                                              : BinaryOp::Ge;
            lhs = make_binop(b, lhs, rhs, ValueType::bool_type(), op.span);
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            Token op = take();
            ExprPtr rhs = parse_multiplicative();
            ValueType t = numeric_result(lhs, rhs, op.span,
                                         op.kind == Tok::Plus ? "+" : "-");
            lhs = make_binop(op.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub, lhs, rhs, t,
                             op.span);
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
            Token op = take();
            ExprPtr rhs = parse_unary();
            const char* name = op.kind == Tok::Star ? "*" : op.kind == Tok::Slash ? "/" : "%";
            ValueType t = numeric_result(lhs, rhs, op.span, name);
            BinaryOp b = op.kind == Tok::Star    ? BinaryOp::Mul
                         : op.kind == Tok::Slash ? BinaryOp::Div
                                                 : BinaryOp::Mod;
            lhs = make_binop(b, lhs, rhs, t, op.span);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (at(Tok::Bang)) {
            Token op = take();
            ExprPtr operand = parse_unary();
            require_type(*operand, ValueType::bool_type(), "operator ! requires a bool operand");
            auto e = std::make_shared<UdfExpr>();
            e->node = UdfExpr::Node::Unary;
            e->un_op = UnaryOp::Not;
            e->a = operand;
            e->result_type = ValueType::bool_type();
            e->span = op.span;
            return e;
        }
        if (at(Tok::Minus)) {
            Token op = take();
            ExprPtr operand = parse_unary();
            if (!operand->result_type.is_numeric())
                type_error(op.span, "unary - requires a numeric operand");
            auto e = std::make_shared<UdfExpr>();
            e->node = UdfExpr::Node::Unary;
            e->un_op = UnaryOp::Neg;
            e->a = operand;
            e->result_type = operand->result_type;
            e->span = op.span;
            return e;
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (at(Tok::Dot)) {
            Token dot = take();
            Token field = expect(Tok::Ident, "'key' or 'value'");
            if (field.text != "key" && field.text != "value") {
                diags_.push_back({DiagnosticCode::Syntax, Severity::Error,
                                  "expected 'key' or 'value' after '.'", field.span});
                throw ParseError{};
            }
            if (!e->result_type.is_pair())
                type_error(dot.span, "projection ." + field.text + " requires a pair, got " +
                                         e->result_type.to_string());
            auto p = std::make_shared<UdfExpr>();
            p->node = field.text == "key" ? UdfExpr::Node::ProjKey : UdfExpr::Node::ProjValue;
            p->a = e;
            p->result_type = field.text == "key" ? e->result_type.key() : e->result_type.value();
            p->span = dot.span;
            e = p;
        }
        return e;
    }

    ExprPtr parse_primary() {
        Token t = cur();
        switch (t.kind) {
        case Tok::IntLit: {
            take();
            auto e = std::make_shared<UdfExpr>();
            e->node = UdfExpr::Node::IntLit;
            e->int_val = t.int_val;
            e->result_type = ValueType::int_type();
            e->span = t.span;
            return e;
        }
        case Tok::FloatLit: {
            take();
            auto e = std::make_shared<UdfExpr>();
            e->node = UdfExpr::Node::FloatLit;
            e->float_val = t.float_val;
            e->result_type = ValueType::float_type();
            e->span = t.span;
            return e;
        }
        case Tok::StrLit: {
            take();
            auto e = std::make_shared<UdfExpr>();
            e->node = UdfExpr::Node::StrLit;
            e->str_val = t.text;
            e->result_type = ValueType::str_type();
            e->span = t.span;
            return e;
        }
        case Tok::LParen: {
            take();
            ExprPtr first = parse_expr();
            if (accept(Tok::Comma)) {
                ExprPtr second = parse_expr();
                expect(Tok::RParen, "')'");
                auto e = std::make_shared<UdfExpr>();
                e->node = UdfExpr::Node::PairCtor;
                e->a = first;
                e->b = second;
                e->result_type =
                    ValueType::pair_type(first->result_type, second->result_type);
                e->span = t.span;
                return e;
            }
            expect(Tok::RParen, "')'");
            return first;
        }
        case Tok::Ident: {
            if (t.text == "true" || t.text == "false") {
                take();
                auto e = std::make_shared<UdfExpr>();
                e->node = UdfExpr::Node::BoolLit;
                e->bool_val = t.text == "true";
                e->result_type = ValueType::bool_type();
                e->span = t.span;
                return e;
            }
            if (t.text == "emptyList") return parse_empty_list();
            if (peek(1).kind == Tok::LParen) return parse_call();
            take();
            if (params_) {
                for (std::size_t i = 0; i < params_->params.size(); ++i) {
                    if (params_->params[i] == t.text) {
                        auto e = std::make_shared<UdfExpr>();
                        e->node = UdfExpr::Node::Param;
                        e->param_index = static_cast<int>(i);
                        e->param_name = t.text;
                        e->result_type = params_->param_types[i];
                        e->span = t.span;
                        return e;
                    }
                }
            }
            diags_.push_back({DiagnosticCode::UnknownIdentifier, Severity::Error,
                              "unknown identifier '" + t.text + "'", t.span});
            throw ParseError{};
        }
        default:
            error_here(DiagnosticCode::Syntax, "expected an expression");
            throw ParseError{};
        }
    }

    ExprPtr parse_empty_list() {
        Token name = take();  // emptyList
        expect(Tok::Lt, "'<'");
        ValueType elem = parse_type();
        expect(Tok::Gt, "'>'");
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')'");
        auto e = std::make_shared<UdfExpr>();
        e->node = UdfExpr::Node::EmptyList;
        e->result_type = ValueType::list_type(elem);
        e->span = name.span;
        return e;
    }

    ExprPtr parse_call() {
        Token name = take();
        static const std::map<std::string, Builtin> kBuiltins = {
            {"split", Builtin::Split},         {"concat", Builtin::Concat},
            {"contains", Builtin::Contains},   {"startsWith", Builtin::StartsWith},
            {"endsWith", Builtin::EndsWith},   {"lower", Builtin::Lower},
            {"upper", Builtin::Upper},         {"len", Builtin::Len},
            {"head", Builtin::Head},           {"tail", Builtin::Tail},
            {"reverse", Builtin::Reverse},     {"length", Builtin::Length},
        };
        auto it = kBuiltins.find(name.text);
        if (it == kBuiltins.end()) {
            diags_.push_back({DiagnosticCode::UnknownIdentifier, Severity::Error,
                              "unknown function '" + name.text + "'", name.span});
            throw ParseError{};
        }
        expect(Tok::LParen, "'('");
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
            for (;;) {
                args.push_back(parse_expr());
                if (!accept(Tok::Comma)) break;
            }
        }
        expect(Tok::RParen, "')'");
        return type_call(it->second, name, std::move(args));
    }

    ExprPtr type_call(Builtin b, const Token& name, std::vector<ExprPtr> args) {
        auto str = ValueType::str_type();
        auto need = [&](std::size_t n) {
            if (args.size() != n)
                type_error(name.span, name.text + " takes " + std::to_string(n) +
                                          " argument(s), got " + std::to_string(args.size()));
        };
        auto need_str = [&](std::size_t i) {
            if (args[i]->result_type != str)
                type_error(args[i]->span, name.text + " argument " + std::to_string(i + 1) +
                                              " must be string");
        };
        auto need_list = [&](std::size_t i) {
            if (!args[i]->result_type.is_list())
                type_error(args[i]->span, name.text + " argument " + std::to_string(i + 1) +
                                              " must be a list");
        };
        ValueType result;
        switch (b) {
        case Builtin::Split:
            need(2); need_str(0); need_str(1);
            result = ValueType::list_type(str);
            break;
        case Builtin::Concat:
            need(2); need_str(0); need_str(1);
            result = str;
            break;
        case Builtin::Contains:
        case Builtin::StartsWith:
        case Builtin::EndsWith:
            need(2); need_str(0); need_str(1);
            result = ValueType::bool_type();
            break;
        case Builtin::Lower:
        case Builtin::Upper:
            need(1); need_str(0);
            result = str;
            break;
        case Builtin::Len:
            need(1); need_str(0);
            result = ValueType::int_type();
            break;
        case Builtin::Head:
            need(1); need_list(0);
            result = args[0]->result_type.elem();
            break;
        case Builtin::Tail:
        case Builtin::Reverse:
            need(1); need_list(0);
            result = args[0]->result_type;
            break;
        case Builtin::Length:
            need(1); need_list(0);
            result = ValueType::int_type();
            break;
        }
        auto e = std::make_shared<UdfExpr>();
        e->node = UdfExpr::Node::Call;
        e->builtin = b;
        e->args = std::move(args);
        e->result_type = result;
        e->span = name.span;
        return e;
    }

    ExprPtr make_bool_binop(BinaryOp op, ExprPtr lhs, ExprPtr rhs, const SourceSpan& sp) {
        if (lhs->result_type.kind() != ValueType::Kind::Bool ||
            rhs->result_type.kind() != ValueType::Kind::Bool)
            type_error(sp, std::string("operator ") + (op == BinaryOp::And ? "&&" : "||") +
                               " requires bool operands");
        return make_binop(op, std::move(lhs), std::move(rhs), ValueType::bool_type(), sp);
    }

    ExprPtr make_binop(BinaryOp op, ExprPtr lhs, ExprPtr rhs, ValueType result,
                       const SourceSpan& sp) {
        auto e = std::make_shared<UdfExpr>();
        e->node = UdfExpr::Node::Binary;
        e->bin_op = op;
        e->a = std::move(lhs);
        e->b = std::move(rhs);
        e->result_type = std::move(result);
        e->span = sp;
        return e;
    }

    ValueType numeric_result(const ExprPtr& lhs, const ExprPtr& rhs, const SourceSpan& sp,
                             const std::string& op) {
        if (!lhs->result_type.is_numeric() || !rhs->result_type.is_numeric() ||
            lhs->result_type != rhs->result_type)
            type_error(sp, "operator " + op + " requires numeric operands");
        return lhs->result_type;
    }

    [[noreturn]] void type_error(const SourceSpan& sp, const std::string& msg) {
        diags_.push_back({DiagnosticCode::Type, Severity::Error, msg, sp});
        throw ParseError{};
    }

    void require_type(const UdfExpr& e, const ValueType& t, const std::string& msg) {
        if (e.result_type != t) type_error(e.span, msg);
    }

    // ---- token plumbing --------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t n) const {
        std::size_t i = pos_ + n;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_keyword(const std::string& kw) const {
        return cur().kind == Tok::Ident && cur().text == kw;
    }
    Token take() { return toks_[pos_++]; }
    bool accept(Tok k) {
        if (at(k)) {
            ++pos_;
            return true;
        }
        return false;
    }
    Token expect(Tok k, const std::string& what) {
        if (!at(k)) {
            error_here(DiagnosticCode::Syntax, "expected " + what);
            throw ParseError{};
        }
        return take();
    }
    void expect_keyword(const std::string& kw) {
        if (!at_keyword(kw)) {
            error_here(DiagnosticCode::Syntax, "expected '" + kw + "'");
            throw ParseError{};
        }
        take();
    }
    void expect_line_end() {
        if (at(Tok::End)) return;
        if (!at(Tok::Newline)) {
            error_here(DiagnosticCode::Syntax, "expected end of line");
            throw ParseError{};
        }
        take();
    }
    void skip_newlines() {
        while (at(Tok::Newline)) take();
    }
    void recover_to_line_end() {
        while (!at(Tok::Newline) && !at(Tok::End)) take();
        skip_newlines();
    }
    void error_here(DiagnosticCode code, const std::string& msg) {
        diags_.push_back({code, Severity::Error, msg, cur().span});
    }

    static std::optional<TransformationKind> kind_from_name(const std::string& n) {
        static const std::map<std::string, TransformationKind> kKinds = {
            {"map", TransformationKind::Map},
            {"flatMap", TransformationKind::FlatMap},
            {"filter", TransformationKind::Filter},
            {"distinct", TransformationKind::Distinct},
            {"sortBy", TransformationKind::SortBy},
            {"sortByKey", TransformationKind::SortByKey},
            {"groupByKey", TransformationKind::GroupByKey},
            {"reduceByKey", TransformationKind::ReduceByKey},
            {"union", TransformationKind::Union},
            {"intersection", TransformationKind::Intersection},
            {"subtract", TransformationKind::Subtract},
            {"join", TransformationKind::Join},
            {"leftOuterJoin", TransformationKind::LeftOuterJoin},
            {"rightOuterJoin", TransformationKind::RightOuterJoin},
            {"fullOuterJoin", TransformationKind::FullOuterJoin},
        };
        auto it = kKinds.find(n);
        if (it == kKinds.end()) return std::nullopt;
        return it->second;
    }

    static bool is_reserved(const std::string& n) {
        static const std::set<std::string> kReserved = {
            "program", "input", "output", "if", "then", "else",
            "true",    "false", "asc",    "desc",
        };
        return kReserved.count(n) > 0;
    }

    std::vector<Token> toks_;
    std::vector<ParseDiagnostic>& diags_;
    std::size_t pos_ = 0;
    const Lambda* params_ = nullptr;
};

}  // namespace

ParseResult parse_source(const std::string& source, const std::string& filename) {
    ParseResult res;
    Lexer lexer(source, filename);
    std::vector<Token> toks = lexer.run(res.diagnostics);
    if (has_errors(res.diagnostics)) return res;
    Parser parser(std::move(toks), res.diagnostics);
    auto programs = parser.parse_file();
    if (has_errors(res.diagnostics)) return res;
    for (auto& g : programs) {
        ValidationResult v = validate(g);
        for (const auto& d : v.diagnostics)
            res.diagnostics.push_back({DiagnosticCode::Type, Severity::Error,
                                       "program '" + g.name + "': " + d.message,
                                       SourceSpan{filename, 1, 1, 0}});
    }
    if (!has_errors(res.diagnostics)) res.programs = std::move(programs);
    return res;
}

std::string to_string(const ParseDiagnostic& d) {
    const char* code = "";
    switch (d.code) {
    case DiagnosticCode::Lexical: code = "lexical"; break;
    case DiagnosticCode::Syntax: code = "syntax"; break;
    case DiagnosticCode::Type: code = "type"; break;
    case DiagnosticCode::UnknownIdentifier: code = "unknown-identifier"; break;
    }
    std::string sev = d.severity == Severity::Error ? "error" : "warning";
    return d.span.file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
           ": " + sev + " (" + code + "): " + d.message;
}

}  // namespace flowmut
