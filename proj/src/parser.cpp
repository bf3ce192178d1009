// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <string>
#include <vector>

namespace typestate {

namespace {

enum class Tok {
  Ident,
  Float,
  Keyword,
  Punct,
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  SourceSpan span;
};

const std::set<std::string, std::less<>> kKeywords = {
    "class", "enum", "val",  "fun",  "rec",   "end",  "if",   "else",  "match", "label",
    "continue", "new", "this", "unit", "null", "true", "false", "void", "bool", "float",
};

struct SyntaxError {
  SourceSpan span;
  std::string message;
};

class Lexer {
 public:
  Lexer(std::string_view text, std::uint32_t file) : text_(text), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::Eof, "", span_at(pos_, pos_)});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  SourceSpan span_at(std::size_t begin, std::size_t end) const {
    return SourceSpan{file_, static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(end),
                      static_cast<std::uint32_t>(line_),
                      static_cast<std::uint32_t>(begin - line_start_ + 1)};
  }

  Token next() {
    std::size_t begin = pos_;
    SourceSpan start = span_at(begin, begin);
    char c = text_[pos_];
    auto finish = [&](Tok kind) {
      Token t{kind, std::string(text_.substr(begin, pos_ - begin)), start};
      t.span.end = static_cast<std::uint32_t>(pos_);
      return t;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        advance();
      Token t = finish(Tok::Ident);
      if (kKeywords.count(t.text)) t.kind = Tok::Keyword;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
      if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
          std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        advance();
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          advance();
      }
      return finish(Tok::Float);
    }
    if (std::string_view("[]{}()<>;:,.=*+#").find(c) != std::string_view::npos) {
      advance();
      return finish(Tok::Punct);
    }
    advance();
    Token bad = finish(Tok::Punct);
    throw SyntaxError{bad.span, "unexpected character '" + bad.text + "'"};
  }

  std::string_view text_;
  std::uint32_t file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

SourceSpan join(SourceSpan a, SourceSpan b) {
  a.end = std::max(a.end, b.end);
  return a;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  SurfaceProgram program(std::vector<Diagnostic>& diags) {
    SurfaceProgram prog;
    bool have_main = false;
    while (!at_eof()) {
      try {
        if (is_keyword("class")) {
          prog.decls.emplace_back(class_decl());
        } else if (is_keyword("enum")) {
          prog.decls.emplace_back(enum_decl());
        } else if (is_ident("main")) {
          if (have_main) fail(peek().span, "duplicate main block");
          prog.main = main_block();
          have_main = true;
        } else {
          fail(peek().span, "expected 'class', 'enum' or 'main', found " + describe(peek()));
        }
      } catch (const SyntaxError& err) {
        diags.push_back(to_diagnostic(err));
        resync();
      }
    }
    if (!have_main && diags.empty())
      diags.push_back(to_diagnostic({peek().span, "expected a 'main' block"}));
    return prog;
  }

  UsagePtr usage_only() {
    UsagePtr u = usage();
    expect_eof();
    return u;
  }

  ExprPtr expression_only() {
    ExprPtr e = expr();
    expect_eof();
    return e;
  }

  static Diagnostic to_diagnostic(const SyntaxError& err) {
    Diagnostic d;
    d.kind = "SyntaxError";
    d.rule = "parse";
    d.span = err.span;
    d.message = err.message;
    return d;
  }

 private:
  // -- token helpers ---------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_eof() const { return peek().kind == Tok::Eof; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  bool is_keyword(std::string_view k) const {
    return peek().kind == Tok::Keyword && peek().text == k;
  }
  bool is_ident(std::string_view name) const {
    return peek().kind == Tok::Ident && peek().text == name;
  }

  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_ = t.span;
    return t;
  }

  bool accept_punct(std::string_view p) {
    if (!is_punct(p)) return false;
    take();
    return true;
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::Eof) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(SourceSpan span, std::string message) const {
    throw SyntaxError{span, std::move(message)};
  }

  void expect_punct(std::string_view p) {
    if (!accept_punct(p))
      fail(peek().span, "expected '" + std::string(p) + "', found " + describe(peek()));
  }

  void expect_keyword(std::string_view k) {
    if (!is_keyword(k))
      fail(peek().span, "expected '" + std::string(k) + "', found " + describe(peek()));
    take();
  }

  const Token& expect_ident(std::string_view what) {
    if (peek().kind != Tok::Ident)
      fail(peek().span, "expected " + std::string(what) + ", found " + describe(peek()));
    return take();
  }

  void expect_eof() {
    if (!at_eof()) fail(peek().span, "unexpected " + describe(peek()) + " after end of input");
  }

  void resync() {
    if (!at_eof()) take();
    while (!at_eof() && !is_keyword("class") && !is_keyword("enum") && !is_ident("main")) take();
  }

  SourceSpan from(SourceSpan start) const { return join(start, last_); }

  // -- declarations ----------------------------------------------------------

  SurfaceClass class_decl() {
    SourceSpan start = peek().span;
    expect_keyword("class");
    SurfaceClass cls;
    cls.name = expect_ident("class name").text;
    expect_punct("[");
    cls.usage = usage();
    expect_punct("]");
    expect_punct("{");
    while (!is_punct("}")) {
      if (is_keyword("val")) {
        cls.fields.push_back(field());
      } else if (is_keyword("fun")) {
        cls.methods.push_back(method());
      } else {
        fail(peek().span, "expected 'val', 'fun' or '}', found " + describe(peek()));
      }
    }
    expect_punct("}");
    cls.span = from(start);
    return cls;
  }

  EnumDecl enum_decl() {
    SourceSpan start = peek().span;
    expect_keyword("enum");
    EnumDecl decl;
    decl.name = expect_ident("enum name").text;
    expect_punct("{");
    decl.labels.push_back(expect_ident("enum label").text);
    while (accept_punct(",")) decl.labels.push_back(expect_ident("enum label").text);
    expect_punct("}");
    decl.span = from(start);
    return decl;
  }

  SurfaceMain main_block() {
    SourceSpan start = take().span;  // `main`
    SurfaceMain m;
    expect_punct("{");
    while (is_keyword("val")) m.fields.push_back(field());
    m.body = block_contents(start);
    expect_punct("}");
    m.span = from(start);
    return m;
  }

  FieldDecl field() {
    SourceSpan start = peek().span;
    expect_keyword("val");
    FieldDecl f;
    f.name = expect_ident("field name").text;
    expect_punct(":");
    f.type = type();
    accept_punct(";");
    f.span = from(start);
    return f;
  }

  SurfaceMethod method() {
    SourceSpan start = peek().span;
    expect_keyword("fun");
    SurfaceMethod m;
    m.name = expect_ident("method name").text;
    expect_punct("(");
    if (!is_punct(")")) {
      SurfaceParam p;
      p.name = expect_ident("parameter name").text;
      expect_punct(":");
      p.type = type();
      m.param = std::move(p);
    }
    expect_punct(")");
    if (accept_punct(":")) m.return_type = type();
    m.body = block();
    m.span = from(start);
    return m;
  }

  TypeAnnot type() {
    if (is_keyword("void")) return take(), TypeAnnot::void_type();
    if (is_keyword("bool")) return take(), TypeAnnot::bool_type();
    if (is_keyword("float")) return take(), TypeAnnot::float_type();
    return TypeAnnot::named(expect_ident("type").text);
  }

  // -- usages ----------------------------------------------------------------

  UsagePtr usage() {
    if (is_keyword("end")) {
      take();
      return usage_end();
    }
    if (is_keyword("rec")) {
      SourceSpan start = take().span;
      std::string var = expect_ident("usage variable").text;
      expect_punct(".");
      UsagePtr u = usage_rec(std::move(var), usage());
      if (!is_contractive(u)) fail(from(start), "non-contractive recursive usage");
      return u;
    }
    if (accept_punct("{")) {
      std::vector<Usage::Arm> arms;
      do {
        std::string m = expect_ident("method name").text;
        expect_punct(";");
        arms.push_back({std::move(m), continuation()});
      } while (accept_punct(","));
      expect_punct("}");
      return usage_branch(std::move(arms));
    }
    if (peek().kind == Tok::Ident) return usage_var(take().text);
    fail(peek().span, "expected usage ('end', 'rec', '{' or a variable), found " + describe(peek()));
  }

  UsagePtr continuation() {
    if (!accept_punct("<")) return usage();
    std::vector<Usage::Arm> arms;
    do {
      std::string l = expect_ident("choice label").text;
      expect_punct(":");
      arms.push_back({std::move(l), usage()});
    } while (accept_punct(","));
    expect_punct(">");
    return usage_choice(std::move(arms));
  }

  // -- expressions -----------------------------------------------------------

  ExprPtr block() {
    SourceSpan start = peek().span;
    expect_punct("{");
    ExprPtr body = block_contents(start);
    expect_punct("}");
    return body;
  }

  /// `expr? ;?` up to (not including) the closing brace.
  ExprPtr block_contents(SourceSpan start) {
    if (is_punct("}")) return make_expr(Expr::Unit{}, peek().span);
    (void)start;
    return expr();
  }

  ExprPtr expr() { return seq(); }

  bool ends_sequence() const {
    return is_punct("}") || is_punct(")") || at_eof() ||
           (peek().kind == Tok::Ident && is_punct(":", 1));
  }

  ExprPtr seq() {
    ExprPtr first = stmt();
    if (!accept_punct(";")) return first;
    if (ends_sequence()) return first;  // trailing semicolon
    ExprPtr rest = seq();
    return make_expr(Expr::Seq{first, rest}, join(first->span, rest->span));
  }

  ExprPtr stmt() {
    SourceSpan start = peek().span;
    if (is_keyword("if")) {
      take();
      expect_punct("(");
      ExprPtr cond = expr();
      expect_punct(")");
      ExprPtr then_branch = block();
      expect_keyword("else");
      ExprPtr else_branch = block();
      return make_expr(Expr::If{cond, then_branch, else_branch}, from(start));
    }
    if (is_keyword("match")) {
      take();
      expect_punct("(");
      ExprPtr scrutinee = expr();
      expect_punct(")");
      expect_punct("{");
      Expr::Match m{scrutinee, {}};
      do {
        SourceSpan arm_start = peek().span;
        std::string label = expect_ident("match label").text;
        expect_punct(":");
        ExprPtr body = expr();
        m.arms.push_back({std::move(label), body, from(arm_start)});
        accept_punct(",");
      } while (!is_punct("}"));
      expect_punct("}");
      return make_expr(std::move(m), from(start));
    }
    if (is_keyword("label")) {
      take();
      std::string label = expect_ident("loop label").text;
      ExprPtr body = block();
      return make_expr(Expr::Labelled{std::move(label), body}, from(start));
    }
    if (is_keyword("continue")) {
      take();
      std::string label = expect_ident("loop label").text;
      return make_expr(Expr::Continue{std::move(label)}, from(start));
    }

    ExprPtr lhs = additive();
    if (!is_punct("=")) return lhs;
    Ref target;
    std::string field;
    if (const auto* read = lhs->as<Expr::FieldRead>()) {
      target = read->target;
      field = read->field;
    } else if (const auto* name = lhs->as<Expr::Name>()) {
      target = Ref::bare(name->name);
      field = name->name;
    } else {
      fail(peek().span, "left-hand side of '=' must be a field");
    }
    take();
    if (is_keyword("new")) {
      take();
      std::string cls = expect_ident("class name").text;
      return make_expr(Expr::FieldAssignNew{target, field, std::move(cls)}, from(start));
    }
    ExprPtr rhs = stmt();
    return make_expr(Expr::FieldAssign{target, field, rhs}, from(start));
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (accept_punct("+")) {
      ExprPtr rhs = multiplicative();
      lhs = make_expr(Expr::FloatAdd{lhs, rhs}, join(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = primary();
    while (accept_punct("*")) {
      ExprPtr rhs = primary();
      lhs = make_expr(Expr::FloatMul{lhs, rhs}, join(lhs->span, rhs->span));
    }
    return lhs;
  }

  ExprPtr call_rest(SourceSpan start, Ref receiver, std::string method) {
    expect_punct("(");
    ExprPtr arg;
    if (is_punct(")")) {
      arg = make_expr(Expr::Unit{}, peek().span);
    } else {
      arg = expr();
    }
    expect_punct(")");
    return make_expr(Expr::Call{std::move(receiver), std::move(method), arg}, from(start));
  }

  ExprPtr primary() {
    SourceSpan start = peek().span;
    const Token& t = peek();
    if (t.kind == Tok::Keyword) {
      if (t.text == "unit") return take(), make_expr(Expr::Unit{}, start);
      if (t.text == "null") return take(), make_expr(Expr::Null{}, start);
      if (t.text == "true") return take(), make_expr(Expr::BoolLit{true}, start);
      if (t.text == "false") return take(), make_expr(Expr::BoolLit{false}, start);
      if (t.text == "this") {
        take();
        expect_punct(".");
        std::string first = expect_ident("field or method name").text;
        if (is_punct("(")) return call_rest(start, Ref::this_ref(), std::move(first));
        if (accept_punct(".")) {
          std::string method = expect_ident("method name").text;
          if (!is_punct("("))
            fail(peek().span, "nested field access is not supported; expected '('");
          return call_rest(start, Ref::this_field(std::move(first)), std::move(method));
        }
        return make_expr(Expr::FieldRead{Ref::this_ref(), std::move(first)}, from(start));
      }
    }
    if (t.kind == Tok::Float) {
      double value = 0;
      const std::string& text = t.text;
      std::from_chars(text.data(), text.data() + text.size(), value);
      take();
      return make_expr(Expr::FloatLit{value}, start);
    }
    if (t.kind == Tok::Ident) {
      std::string name = take().text;
      if (accept_punct(".")) {
        std::string method = expect_ident("method name").text;
        if (!is_punct("(")) fail(peek().span, "expected '(' after method name");
        return call_rest(start, Ref::bare(std::move(name)), std::move(method));
      }
      return make_expr(Expr::Name{std::move(name)}, start);
    }
    if (accept_punct("#")) {
      std::string label = expect_ident("enum label").text;
      return make_expr(Expr::EnumLit{Ref::this_ref(), "", std::move(label)}, from(start));
    }
    if (accept_punct("(")) {
      ExprPtr inner = expr();
      expect_punct(")");
      return inner;
    }
    fail(t.span, "expected expression, found " + describe(t));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SourceSpan last_;
};

template <class T, class F>
Outcome<T> run_parser(std::string_view text, std::uint32_t file_id, F&& body) {
  try {
    Parser p(Lexer(text, file_id).run());
    return Outcome<T>::success(body(p));
  } catch (const SyntaxError& err) {
    return Outcome<T>::failure({Parser::to_diagnostic(err)});
  }
}

}  // namespace

Outcome<SurfaceProgram> parse(std::string_view text, std::uint32_t file_id) {
  std::vector<Token> tokens;
  try {
    tokens = Lexer(text, file_id).run();
  } catch (const SyntaxError& err) {
    return Outcome<SurfaceProgram>::failure({Parser::to_diagnostic(err)});
  }
  Parser p(std::move(tokens));
  std::vector<Diagnostic> diags;
  SurfaceProgram prog = p.program(diags);
  if (!diags.empty()) return Outcome<SurfaceProgram>::failure(std::move(diags));
  return Outcome<SurfaceProgram>::success(std::move(prog));
}

Outcome<UsagePtr> parse_usage(std::string_view text, std::uint32_t file_id) {
  return run_parser<UsagePtr>(text, file_id, [](Parser& p) { return p.usage_only(); });
}

Outcome<ExprPtr> parse_expression(std::string_view text, std::uint32_t file_id) {
  return run_parser<ExprPtr>(text, file_id, [](Parser& p) { return p.expression_only(); });
}

}  // namespace typestate
