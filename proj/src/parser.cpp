#include "envcalc/parser.hpp"

#include <cctype>
#include <vector>

namespace envcalc::cli {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      reason_(message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> lex(std::string_view s, std::size_t line0, std::size_t col0) {
  std::vector<Token> out;
  std::size_t line = 1 + line0, col = 1 + col0;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const std::size_t l = line, cl = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        if (j == s.size() || !std::isdigit(static_cast<unsigned char>(s[j]))) {
          throw ParseError("malformed number", line, col + (j - i));
        }
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      out.push_back({Tok::Number, std::string(s.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
    }
    out.push_back({k, std::string(1, c), l, cl});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const VariableContext& ctx) : toks_(std::move(toks)), ctx_(ctx) {}

  sym::Expr parse_all() {
    sym::Expr e = expr();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, peek().line, peek().column);
  }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    ++pos_;
  }

  sym::Expr expr() {
    std::vector<sym::Expr> terms{term()};
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const bool minus = take().kind == Tok::Minus;
      sym::Expr t = term();
      terms.push_back(minus ? sym::neg(t) : t);
    }
    return sym::add(std::move(terms));
  }

  sym::Expr term() {
    sym::Expr acc = factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const bool divide = take().kind == Tok::Slash;
      sym::Expr f = factor();
      if (!divide) {
        acc = sym::mul({acc, f});
      } else if (acc.is_const() && f.is_const() && !f.value().is_zero()) {
        acc = sym::Expr(acc.value() / f.value());
      } else {
        acc = sym::mul({acc, sym::pow(f, -1)});
      }
    }
    return acc;
  }

  sym::Expr factor() {
    if (peek().kind == Tok::Minus) {
      take();
      return sym::neg(factor());
    }
    sym::Expr b = base();
    if (peek().kind == Tok::Caret) {
      take();
      bool negative = false;
      if (peek().kind == Tok::Minus) {
        take();
        negative = true;
      }
      if (peek().kind != Tok::Number || peek().text.find('.') != std::string::npos) {
        fail("expected integer exponent");
      }
      const Token& tok = take();
      long n = 0;
      try {
        n = std::stol(tok.text);
      } catch (const std::exception&) {
        throw ParseError("exponent out of range", tok.line, tok.column);
      }
      if (n > 1000) throw ParseError("exponent out of range", tok.line, tok.column);
      b = sym::pow(b, static_cast<int>(negative ? -n : n));
    }
    return b;
  }

  sym::Expr base() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::Number:
        take();
        return sym::Expr(Rational::parse(tok.text));
      case Tok::LParen: {
        take();
        sym::Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident:
        return identifier();
      default:
        fail(tok.kind == Tok::End ? "expected operand" : "unexpected '" + tok.text + "'");
    }
  }

  sym::Expr identifier() {
    const Token tok = take();
    static const std::pair<const char*, sym::Kind> kFuncs[] = {
        {"exp", sym::Kind::Exp}, {"sin", sym::Kind::Sin}, {"cos", sym::Kind::Cos}, {"log", sym::Kind::Log}};
    for (const auto& [name, kind] : kFuncs) {
      if (tok.text == name) {
        expect(Tok::LParen, "'(' after function name");
        sym::Expr a = expr();
        expect(Tok::RParen, "')'");
        return sym::apply_function(kind, a);
      }
    }
    const std::string& s = tok.text;
    const bool shaped = s.size() >= 2 && (s[0] == 'x' || s[0] == 'y' || s[0] == 't') &&
                        s.find_first_not_of("0123456789", 1) == std::string::npos;
    if (!shaped) throw ParseError("unknown identifier '" + s + "'", tok.line, tok.column);
    const auto group = s[0] == 'x' ? sym::Group::X : (s[0] == 'y' ? sym::Group::Y : sym::Group::T);
    const unsigned long index = s.size() > 10 ? 0 : std::stoul(s.substr(1));
    if (index == 0) throw ParseError("bad variable index in '" + s + "'", tok.line, tok.column);
    const int g = static_cast<int>(group);
    if (!ctx_.allowed[g]) {
      throw ParseError("variable '" + s + "' is from the wrong group here", tok.line, tok.column);
    }
    if (ctx_.max_index[g] != 0 && index > ctx_.max_index[g]) {
      throw ParseError("variable '" + s + "' exceeds the model dimension", tok.line, tok.column);
    }
    return sym::variable({group, static_cast<std::uint32_t>(index)});
  }

  std::vector<Token> toks_;
  VariableContext ctx_;
  std::size_t pos_ = 0;
};

}  // namespace

sym::Expr parse_expr(std::string_view text, const VariableContext& ctx, std::size_t line_offset,
                     std::size_t column_offset) {
  return Parser(lex(text, line_offset, column_offset), ctx).parse_all();
}

}  // namespace envcalc::cli
