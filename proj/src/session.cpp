#include "envcalc/session.hpp"

#include <cctype>

namespace envcalc::cli {

namespace {

struct Piece {
  std::string_view text;
  std::size_t column;  // 0-based offset of text within the line
};

std::size_t skip_space(std::string_view s, std::size_t i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return i;
}

Piece trim(std::string_view s, std::size_t column) {
  std::size_t b = skip_space(s, 0);
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return {s.substr(b, e - b), column + b};
}

// Splits "[a, b, ...]" at top-level commas.
std::vector<Piece> split_list(Piece list, std::size_t line_no) {
  if (list.text.size() < 2 || list.text.front() != '[' || list.text.back() != ']') {
    throw ParseError("expected a bracketed list", line_no, list.column + 1);
  }
  std::vector<Piece> out;
  const std::string_view body = list.text.substr(1, list.text.size() - 2);
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i < body.size() && body[i] == '(') ++depth;
    if (i < body.size() && body[i] == ')') --depth;
    if (i == body.size() || (body[i] == ',' && depth == 0)) {
      const Piece p = trim(body.substr(start, i - start), list.column + 1 + start);
      if (p.text.empty()) {
        if (i == body.size() && out.empty()) break;
        throw ParseError("empty list entry", line_no, p.column + 1);
      }
      out.push_back(p);
      start = i + 1;
    }
  }
  return out;
}

bool valid_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (const char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

}  // namespace

EnvelopeElement Session::lift(const sym::Expr& e) const {
  if (auto a = AElement::try_from_expr(e)) return embed_A(*a);
  const std::uint32_t m = model_.m();
  const sym::Expr h = sym::rename(e, [m](sym::VarId v) {
    return v.group == sym::Group::X ? sym::t(v.index) : sym::t(m + v.index);
  });
  std::vector<AElement> args;
  for (const sym::VarId v : model_.coordinates()) {
    const sym::Expr c = sym::variable(v);
    args.push_back(v.group == sym::Group::X ? AElement::from_x(c) : AElement::from_y(c));
  }
  return EnvelopeElement(h, std::move(args));
}

void Session::declare(std::string_view line, std::size_t line_no) {
  const Piece whole = trim(line, 0);
  if (whole.text.empty() || whole.text.front() == '#') return;
  const std::size_t eq = line.find(":=");
  if (eq == std::string_view::npos) throw ParseError("expected 'name := ...'", line_no, whole.column + 1);
  const Piece name = trim(line.substr(0, eq), 0);
  if (!valid_name(name.text)) throw ParseError("invalid name '" + std::string(name.text) + "'", line_no, name.column + 1);
  const std::string key(name.text);
  if (functions_.contains(key) || derivations_.contains(key)) {
    throw ParseError("'" + key + "' is already declared", line_no, name.column + 1);
  }
  const Piece rhs = trim(line.substr(eq + 2), eq + 2);
  if (rhs.text.empty()) throw ParseError("missing right-hand side", line_no, eq + 3);
  const auto product = VariableContext::product(model_.m(), model_.n());

  if (rhs.text.front() == '[') {
    const auto entries = split_list(rhs, line_no);
    if (entries.size() != model_.dimension()) {
      throw ParseError("derivation needs " + std::to_string(model_.dimension()) + " values, got " +
                           std::to_string(entries.size()),
                       line_no, rhs.column + 1);
    }
    DerivationEnv x;
    for (const auto& p : entries) x.values.push_back(lift(parse_expr(p.text, product, line_no - 1, p.column)));
    derivations_.emplace(key, std::move(x));
    return;
  }

  const std::size_t at = rhs.text.find('@');
  if (at == std::string_view::npos) {
    functions_.emplace(key, lift(parse_expr(rhs.text, product, line_no - 1, rhs.column)));
    return;
  }
  const Piece outer = trim(rhs.text.substr(0, at), rhs.column);
  const sym::Expr h = parse_expr(outer.text, VariableContext::outer(), line_no - 1, outer.column);
  std::vector<AElement> args;
  for (const auto& p : split_list(trim(rhs.text.substr(at + 1), rhs.column + at + 1), line_no)) {
    auto a = AElement::try_from_expr(parse_expr(p.text, product, line_no - 1, p.column));
    if (!a) throw ParseError("argument is not a finite sum of f(x)*g(y)", line_no, p.column + 1);
    args.push_back(std::move(*a));
  }
  if (sym::max_t_index(h) > args.size()) {
    throw ParseError("outer function uses t" + std::to_string(sym::max_t_index(h)) + " but only " +
                         std::to_string(args.size()) + " arguments are given",
                     line_no, outer.column + 1);
  }
  functions_.emplace(key, EnvelopeElement(h, std::move(args)));
}

void Session::load(std::string_view text) {
  std::size_t line_no = 1;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    declare(text.substr(0, nl), line_no++);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

const EnvelopeElement& Session::function(const std::string& name) const {
  const auto it = functions_.find(name);
  if (it == functions_.end()) throw std::out_of_range("no function named '" + name + "'");
  return it->second;
}

const DerivationEnv& Session::derivation(const std::string& name) const {
  const auto it = derivations_.find(name);
  if (it == derivations_.end()) throw std::out_of_range("no derivation named '" + name + "'");
  return it->second;
}

std::vector<std::string> Session::function_names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : functions_) out.push_back(k);
  return out;
}

std::vector<std::string> Session::derivation_names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : derivations_) out.push_back(k);
  return out;
}

}  // namespace envcalc::cli
