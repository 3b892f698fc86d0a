#include "hypsearch/parse.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <unordered_set>

#include "hypsearch/error.hpp"

namespace hypsearch {
namespace {

struct Token {
  enum Kind { Number, Ident, LParen, RParen, Comma, Plus, Minus, Star, Slash, Cmp, Eq, End };
  Kind kind = End;
  double number = 0.0;
  std::string text;   // identifier or comparison spelling
  long pos = 0;       // byte offset into the full source
};

[[noreturn]] void fail(Errc code, const std::string& msg, long pos) {
  throw Error(code, msg + " (offset " + std::to_string(pos) + ")", pos);
}

class Lexer {
 public:
  Lexer(std::string_view src, long base_offset) : src_(src), base_(base_offset) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t' || src_[i_] == '\n' ||
                                src_[i_] == '\r')) {
      ++i_;
    }
    current_ = Token{};
    current_.pos = base_ + static_cast<long>(i_);
    if (i_ >= src_.size()) {
      current_.kind = Token::End;
      return;
    }
    char c = src_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
      current_.kind = Token::Ident;
      current_.text = std::string(src_.substr(i_, j - i_));
      i_ = j;
      return;
    }
    switch (c) {
      case '(': current_.kind = Token::LParen; ++i_; return;
      case ')': current_.kind = Token::RParen; ++i_; return;
      case ',': current_.kind = Token::Comma; ++i_; return;
      case '+': current_.kind = Token::Plus; ++i_; return;
      case '-': current_.kind = Token::Minus; ++i_; return;
      case '*': current_.kind = Token::Star; ++i_; return;
      case '/': current_.kind = Token::Slash; ++i_; return;
      case '=': current_.kind = Token::Eq; ++i_; return;
      case '>':
      case '<': {
        current_.kind = Token::Cmp;
        if (i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
          current_.text = std::string(src_.substr(i_, 2));
          i_ += 2;
        } else {
          current_.text = std::string(1, c);
          ++i_;
        }
        return;
      }
      default:
        fail(Errc::SyntaxError, std::string("unexpected character '") + c + "'", current_.pos);
    }
  }

  void lex_number() {
    const char* begin = src_.data() + i_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail(Errc::SyntaxError, "malformed number", current_.pos);
    // strtod may consume past the lexeme end only within this line slice,
    // which is exactly what we want for exponents like 1e+30.
    size_t len = static_cast<size_t>(end - begin);
    if (i_ + len > src_.size()) len = src_.size() - i_;
    current_.kind = Token::Number;
    current_.number = v;
    i_ += len;
  }

  std::string_view src_;
  long base_;
  size_t i_ = 0;
  Token current_;
};

CmpOp cmp_from_text(const std::string& t, long pos) {
  if (t == ">=") return CmpOp::Ge;
  if (t == ">") return CmpOp::Gt;
  if (t == "<=") return CmpOp::Le;
  if (t == "<") return CmpOp::Lt;
  fail(Errc::SyntaxError, "bad comparison '" + t + "'", pos);
}

std::optional<UnaryOp> unary_from_name(std::string_view n) {
  if (n == "neg") return UnaryOp::Neg;
  if (n == "abs") return UnaryOp::Abs;
  if (n == "sin") return UnaryOp::Sin;
  if (n == "cos") return UnaryOp::Cos;
  if (n == "tanh") return UnaryOp::Tanh;
  if (n == "sigmoid") return UnaryOp::Sigmoid;
  if (n == "exp") return UnaryOp::Exp;
  if (n == "softplus") return UnaryOp::Softplus;
  if (n == "sqrt") return UnaryOp::Sqrt;
  if (n == "log") return UnaryOp::Log;
  return std::nullopt;
}

bool is_function_name(std::string_view n) {
  return unary_from_name(n).has_value() || n == "min" || n == "max" || n == "pow" || n == "where";
}

class ExprParser {
 public:
  ExprParser(Lexer& lex, Expr& expr, const std::unordered_set<std::string>& params)
      : lex_(lex), expr_(expr), params_(params) {}

  int32_t parse_expression() {
    int32_t lhs = parse_term();
    while (lex_.peek().kind == Token::Plus || lex_.peek().kind == Token::Minus) {
      Token op = lex_.take();
      int32_t rhs = parse_term();
      lhs = expr_.binary(op.kind == Token::Plus ? BinaryOp::Add : BinaryOp::Sub, lhs, rhs);
    }
    return lhs;
  }

 private:
  int32_t parse_term() {
    int32_t lhs = parse_factor();
    while (lex_.peek().kind == Token::Star || lex_.peek().kind == Token::Slash) {
      Token op = lex_.take();
      int32_t rhs = parse_factor();
      lhs = expr_.binary(op.kind == Token::Star ? BinaryOp::Mul : BinaryOp::Div, lhs, rhs);
    }
    return lhs;
  }

  int32_t parse_factor() {
    if (lex_.peek().kind == Token::Minus) {
      lex_.take();
      return expr_.unary(UnaryOp::Neg, parse_factor());
    }
    return parse_atom();
  }

  int32_t parse_atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Token::Number:
        return expr_.constant(t.number);
      case Token::LParen: {
        int32_t inner = parse_expression();
        expect(Token::RParen, ")");
        return inner;
      }
      case Token::Ident: {
        if (lex_.peek().kind == Token::LParen) return parse_call(t);
        if (is_function_name(t.text)) {
          fail(Errc::SyntaxError, "'" + t.text + "' is a function and needs arguments", t.pos);
        }
        if (params_.count(t.text)) return expr_.parameter(t.text);
        return expr_.variable(t.text);
      }
      default:
        fail(Errc::SyntaxError, "expected an expression", t.pos);
    }
  }

  int32_t parse_call(const Token& name) {
    lex_.take();  // consume '('
    if (name.text == "where") {
      int32_t lhs = parse_expression();
      Token cmp = lex_.take();
      if (cmp.kind != Token::Cmp) {
        fail(Errc::SyntaxError, "where() needs a comparison as its first argument", cmp.pos);
      }
      int32_t rhs = parse_expression();
      expect(Token::Comma, ",");
      int32_t then_branch = parse_expression();
      expect(Token::Comma, ",");
      int32_t else_branch = parse_expression();
      expect(Token::RParen, ")");
      return expr_.where(cmp_from_text(cmp.text, cmp.pos), lhs, rhs, then_branch, else_branch);
    }
    if (name.text == "min" || name.text == "max" || name.text == "pow") {
      int32_t a = parse_expression();
      expect(Token::Comma, ",");
      int32_t b = parse_expression();
      expect(Token::RParen, ")");
      BinaryOp op = name.text == "min" ? BinaryOp::Min
                    : name.text == "max" ? BinaryOp::Max
                                         : BinaryOp::Pow;
      return expr_.binary(op, a, b);
    }
    if (auto u = unary_from_name(name.text)) {
      int32_t a = parse_expression();
      expect(Token::RParen, ")");
      return expr_.unary(*u, a);
    }
    fail(Errc::UnknownFunction, "unknown function '" + name.text + "'", name.pos);
  }

  void expect(Token::Kind kind, const char* what) {
    Token t = lex_.take();
    if (t.kind != kind) fail(Errc::SyntaxError, std::string("expected '") + what + "'", t.pos);
  }

  Lexer& lex_;
  Expr& expr_;
  const std::unordered_set<std::string>& params_;
};

// Strips a '#' comment; only the component line carries a quoted string
// and '#' never appears inside the (quote-delimited) name we accept.
std::string_view strip_comment(std::string_view line) {
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quotes = !in_quotes;
    if (line[i] == '#' && !in_quotes) return line.substr(0, i);
  }
  return line;
}

bool is_blank(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

struct Line {
  std::string_view text;
  long offset;
};

HypothesisProgram parse_impl(const std::string& text, bool enforce_kind) {
  std::vector<Line> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view raw(text.data() + start, end - start);
    std::string_view stripped = strip_comment(raw);
    if (!is_blank(stripped)) lines.push_back({stripped, static_cast<long>(start)});
    if (end == text.size()) break;
    start = end + 1;
  }
  if (lines.empty()) throw Error(Errc::SyntaxError, "empty program text", 0);

  HypothesisProgram prog;

  // component <kind> "<name>" — parsed by hand since the quoted name may
  // contain characters the expression lexer rejects.
  {
    std::string_view line = lines[0].text;
    long base = lines[0].offset;
    size_t i = 0;
    auto skip_ws = [&] {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    };
    auto read_word = [&] {
      size_t b = i;
      while (i < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) {
        ++i;
      }
      return line.substr(b, i - b);
    };
    skip_ws();
    long kw_pos = base + static_cast<long>(i);
    if (read_word() != "component") fail(Errc::SyntaxError, "expected 'component'", kw_pos);
    skip_ws();
    long kind_pos = base + static_cast<long>(i);
    std::string_view kind_word = read_word();
    try {
      prog.kind = kind_from_name(std::string(kind_word));
    } catch (const Error&) {
      fail(Errc::SyntaxError, "unknown component kind '" + std::string(kind_word) + "'", kind_pos);
    }
    skip_ws();
    if (i >= line.size() || line[i] != '"') {
      fail(Errc::SyntaxError, "expected quoted component name", base + static_cast<long>(i));
    }
    size_t q2 = line.find('"', i + 1);
    if (q2 == std::string_view::npos) {
      fail(Errc::SyntaxError, "unterminated component name", base + static_cast<long>(i));
    }
    prog.name = std::string(line.substr(i + 1, q2 - i - 1));
    if (!is_blank(line.substr(q2 + 1))) {
      fail(Errc::SyntaxError, "unexpected text after component name", base + static_cast<long>(q2 + 1));
    }
  }

  std::unordered_set<std::string> param_names;
  size_t line_idx = 1;

  // param <ident> = <decimal>
  while (line_idx < lines.size()) {
    Lexer probe(lines[line_idx].text, lines[line_idx].offset);
    if (probe.peek().kind != Token::Ident || probe.peek().text != "param") break;
    Lexer lex(lines[line_idx].text, lines[line_idx].offset);
    lex.take();  // 'param'
    Token name = lex.take();
    if (name.kind != Token::Ident) fail(Errc::SyntaxError, "expected parameter name", name.pos);
    if (is_function_name(name.text)) {
      fail(Errc::SyntaxError, "parameter name '" + name.text + "' collides with a function", name.pos);
    }
    if (is_variable_of(prog.kind, name.text)) {
      fail(Errc::SyntaxError,
           "parameter name '" + name.text + "' collides with a " + std::string(kind_name(prog.kind)) + " variable",
           name.pos);
    }
    if (param_names.count(name.text)) {
      fail(Errc::DuplicateParam, "duplicate parameter '" + name.text + "'", name.pos);
    }
    // '=' then a number (with optional leading '-')
    Token eq = lex.take();
    if (eq.kind != Token::Eq) {
      throw Error(Errc::MissingDefault, "parameter '" + name.text + "' has no default value", eq.pos);
    }
    bool negate = false;
    while (lex.peek().kind == Token::Minus) {
      lex.take();
      negate = !negate;
    }
    Token val = lex.take();
    if (val.kind != Token::Number) {
      throw Error(Errc::MissingDefault, "parameter '" + name.text + "' has no default value", val.pos);
    }
    if (lex.peek().kind != Token::End) {
      fail(Errc::SyntaxError, "unexpected text after parameter default", lex.peek().pos);
    }
    ParamSpec spec;
    spec.name = name.text;
    spec.default_value = negate ? -val.number : val.number;
    prog.params.push_back(spec);
    param_names.insert(name.text);
    ++line_idx;
  }

  // expr <expression>  — the expression may continue over following lines
  if (line_idx >= lines.size()) {
    throw Error(Errc::SyntaxError, "missing 'expr' section", static_cast<long>(text.size()));
  }
  {
    Lexer head(lines[line_idx].text, lines[line_idx].offset);
    Token kw = head.take();
    if (kw.kind != Token::Ident || kw.text != "expr") {
      fail(Errc::SyntaxError, "expected 'param' or 'expr'", kw.pos);
    }
  }
  std::string body;
  long body_offset = 0;
  {
    std::string_view first = lines[line_idx].text;
    size_t after = first.find("expr");
    after += 4;
    body_offset = lines[line_idx].offset + static_cast<long>(after);
    body = std::string(first.substr(after));
    for (size_t i = line_idx + 1; i < lines.size(); ++i) {
      body += ' ';
      body += std::string(lines[i].text);
    }
  }
  // NOTE: multi-line expressions report offsets relative to the joined body.
  Lexer lex(body, body_offset);
  ExprParser ep(lex, prog.expr, param_names);
  int32_t root = ep.parse_expression();
  if (lex.peek().kind != Token::End) {
    fail(Errc::SyntaxError, "unexpected trailing text in expression", lex.peek().pos);
  }
  prog.expr.set_root(root);

  if (enforce_kind) {
    for (size_t i = 0; i < prog.expr.node_count(); ++i) {
      const ExprNode& n = prog.expr.node(static_cast<int32_t>(i));
      if (n.kind == NodeKind::Variable && !is_variable_of(prog.kind, n.symbol)) {
        throw Error(Errc::IllegalVariable,
                    "variable '" + n.symbol + "' is not legal for kind " + std::string(kind_name(prog.kind)));
      }
    }
  }
  return prog;
}

}  // namespace

HypothesisProgram parse(const std::string& text) { return parse_impl(text, true); }

namespace detail {
HypothesisProgram parse_lenient(const std::string& text) { return parse_impl(text, false); }
}  // namespace detail

}  // namespace hypsearch
