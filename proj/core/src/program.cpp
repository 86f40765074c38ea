#include "boxtrace/program.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <utility>

#include "boxtrace/error.hpp"

namespace boxtrace {

namespace {

enum class TokenKind { atom, variable, lparen, rparen, comma, period, neck, end };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') {
        advance(1);
      }
      continue;
    }
    const std::size_t tl = line;
    const std::size_t tc = col;
    auto single = [&](TokenKind k) {
      out.push_back(Token{k, std::string(1, c), tl, tc});
      advance(1);
    };
    switch (c) {
      case '(':
        single(TokenKind::lparen);
        continue;
      case ')':
        single(TokenKind::rparen);
        continue;
      case ',':
        single(TokenKind::comma);
        continue;
      case '.':
        single(TokenKind::period);
        continue;
      case ':':
        if (i + 1 < text.size() && text[i + 1] == '-') {
          out.push_back(Token{TokenKind::neck, ":-", tl, tc});
          advance(2);
          continue;
        }
        throw ParseError("expected ':-'", tl, tc);
      default:
        break;
    }
    if (!is_ident_char(c)) {
      throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
      throw ParseError("numbers are not supported", tl, tc);
    }
    std::size_t j = i;
    while (j < text.size() && is_ident_char(text[j])) {
      ++j;
    }
    const bool lower = std::islower(static_cast<unsigned char>(c)) != 0;
    out.push_back(Token{lower ? TokenKind::atom : TokenKind::variable,
                        std::string(text.substr(i, j - i)), tl, tc});
    advance(j - i);
  }
  out.push_back(Token{TokenKind::end, "", line, col});
  return out;
}

// Splits `Name_k` into (Name, k) when k is a canonical positive integer.
std::optional<Variable> split_renamed(const std::string& name) {
  const auto pos = name.rfind('_');
  if (pos == std::string::npos || pos + 1 >= name.size()) {
    return std::nullopt;
  }
  const std::string_view digits(name.data() + pos + 1, name.size() - pos - 1);
  for (char d : digits) {
    if (std::isdigit(static_cast<unsigned char>(d)) == 0) {
      return std::nullopt;
    }
  }
  if (digits.front() == '0') {
    return std::nullopt;
  }
  std::uint32_t k = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc{} || p != digits.data() + digits.size()) {
    return std::nullopt;
  }
  return Variable{name.substr(0, pos), k};
}

bool has_digit_suffix(const std::string& name) {
  const auto pos = name.rfind('_');
  if (pos == std::string::npos || pos + 1 >= name.size()) {
    return false;
  }
  for (std::size_t k = pos + 1; k < name.size(); ++k) {
    if (std::isdigit(static_cast<unsigned char>(name[k])) == 0) {
      return false;
    }
  }
  return true;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, VariableSyntax syntax)
      : tokens_(std::move(tokens)), syntax_(syntax) {
    // Anonymous variables get names that no identifier in the text uses.
    std::set<std::string> idents;
    for (const Token& t : tokens_) {
      if (t.kind == TokenKind::variable) {
        idents.insert(t.text);
      }
    }
    auto clashes = [&](const std::string& prefix) {
      for (const auto& id : idents) {
        if (id.rfind(prefix, 0) == 0) {
          return true;
        }
      }
      return false;
    };
    while (clashes(anon_prefix_)) {
      anon_prefix_ += 'G';
    }
  }

  Program program() {
    Program prog;
    std::optional<Term> goal;
    while (peek().kind != TokenKind::end) {
      if (peek().kind == TokenKind::neck) {
        const Token neck = next();
        if (goal.has_value()) {
          throw ParseError("duplicate goal directive", neck.line, neck.column);
        }
        anon_count_ = 0;
        goal = predication();
        expect(TokenKind::period, "'.'");
        continue;
      }
      anon_count_ = 0;
      Clause c{predication(), {}, prog.clauses.size()};
      if (peek().kind == TokenKind::neck) {
        next();
        c.body.push_back(predication());
        while (peek().kind == TokenKind::comma) {
          next();
          c.body.push_back(predication());
        }
      }
      expect(TokenKind::period, "'.' or ':-'");
      prog.clauses.push_back(std::move(c));
    }
    if (!goal.has_value()) {
      throw ParseError("missing goal directive ':- goal.'", peek().line, peek().column);
    }
    prog.goal = std::move(*goal);
    return prog;
  }

  Term single_term() {
    Term t = term();
    if (peek().kind != TokenKind::end) {
      throw ParseError("unexpected '" + peek().text + "' after term", peek().line,
                       peek().column);
    }
    return t;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }

  void expect(TokenKind kind, const char* what) {
    if (peek().kind != kind) {
      throw ParseError(std::string("expected ") + what, peek().line, peek().column);
    }
    next();
  }

  Term predication() {
    if (peek().kind != TokenKind::atom) {
      throw ParseError("expected a predication", peek().line, peek().column);
    }
    return term();
  }

  Term term() {
    const Token tok = next();
    if (tok.kind == TokenKind::variable) {
      return variable(tok);
    }
    if (tok.kind != TokenKind::atom) {
      throw ParseError("expected a term", tok.line, tok.column);
    }
    if (peek().kind != TokenKind::lparen) {
      return Term::atom(tok.text);
    }
    next();
    std::vector<Term> args;
    args.push_back(term());
    while (peek().kind == TokenKind::comma) {
      next();
      args.push_back(term());
    }
    expect(TokenKind::rparen, "',' or ')'");
    return Term::compound(tok.text, std::move(args));
  }

  Term variable(const Token& tok) {
    if (tok.text == "_") {
      return Term::variable(anon_prefix_ + std::to_string(++anon_count_));
    }
    if (syntax_ == VariableSyntax::trace) {
      if (auto v = split_renamed(tok.text)) {
        return Term::variable(*v);
      }
      return Term::variable(tok.text);
    }
    if (has_digit_suffix(tok.text)) {
      throw ParseError("variable names ending in _<digits> are reserved for renamed variables",
                       tok.line, tok.column);
    }
    return Term::variable(tok.text);
  }

  std::vector<Token> tokens_;
  VariableSyntax syntax_;
  std::size_t pos_ = 0;
  std::string anon_prefix_ = "_G";
  std::size_t anon_count_ = 0;
};

Term rename_term(const Term& t, std::uint32_t counter) {
  switch (t.kind()) {
    case Term::Kind::variable:
      return Term::variable(t.name(), counter);
    case Term::Kind::atom:
      return t;
    case Term::Kind::compound: {
      std::vector<Term> args;
      args.reserve(t.arity());
      for (const Term& arg : t.args()) {
        args.push_back(rename_term(arg, counter));
      }
      return Term::compound(t.name(), std::move(args));
    }
  }
  return t;
}

}  // namespace

Program parse_program(std::string_view text) {
  return Parser(tokenize(text), VariableSyntax::source).program();
}

Term parse_term(std::string_view text, VariableSyntax syntax) {
  return Parser(tokenize(text), syntax).single_term();
}

std::string render_clause(const Clause& c) {
  std::string out = to_string(c.head);
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    out += i == 0 ? " :- " : ", ";
    out += to_string(c.body[i]);
  }
  out += '.';
  return out;
}

std::string render_program(const Program& p) {
  std::string out;
  for (const Clause& c : p.clauses) {
    out += render_clause(c);
    out += '\n';
  }
  out += ":- ";
  out += to_string(p.goal);
  out += ".\n";
  return out;
}

Clause rename_apart(const Clause& c, std::uint32_t counter) {
  Clause out{rename_term(c.head, counter), {}, c.source_index};
  out.body.reserve(c.body.size());
  for (const Term& g : c.body) {
    out.body.push_back(rename_term(g, counter));
  }
  return out;
}

std::vector<std::size_t> useful_clauses(const Term& p, const Program& prog,
                                        const Substitution& s) {
  const Term goal = apply_subst(p, s);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < prog.clauses.size(); ++i) {
    const Clause& c = prog.clauses[i];
    if (c.head.name() != goal.name() || c.head.arity() != goal.arity()) {
      continue;
    }
    const Term head = rename_term(c.head, kScratchIndex);
    if (unify(goal, head, Substitution{}).has_value()) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace boxtrace
