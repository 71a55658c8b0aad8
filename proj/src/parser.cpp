#include "modal/parser.hpp"

#include <cctype>
#include <map>
#include <optional>

namespace modal::tt {

namespace {

enum class Tok {
  Ident, Keyword, LParen, RParen, Comma, Colon, ColonEq,
  Arrow, FatArrow, StarOp, End,
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

const std::map<std::string, int>& keyword_arity() {
  // Fixed-arity keyword forms; -1 marks structural keywords handled specially.
  static const std::map<std::string, int> table = {
      {"def", -1},   {"fun", -1},   {"Sig", -1},    {"Type", 0},
      {"Unit", 0},   {"Empty", 0},  {"star", 0},
      {"funext", 0}, {"pglue-beta", 0},
      {"fst", 1},    {"snd", 1},
      {"Id", 3},     {"refl", 1},   {"J", 4},
      {"absurd", 2}, {"Sum", 2},    {"inl", 1},     {"inr", 1},  {"case", 4},
      {"Push", 5},   {"pinl", 1},   {"pinr", 1},    {"pglue", 1}, {"pind", 5},
      {"JType", 5},  {"alpha", 1},  {"ext", 3},     {"isext", 3}, {"jind", 5},
  };
  return table;
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto bump = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') { line++; col = 1; } else { col++; }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { bump(1); continue; }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') bump(1);
      continue;
    }
    int tl = line, tc = col;
    if (ident_start(c)) {
      size_t j = i;
      while (j < text.size()) {
        if (ident_char(text[j])) { j++; continue; }
        // '-' stays inside an identifier unless it starts an arrow.
        if (text[j] == '-' && j + 1 < text.size() && text[j + 1] != '>' &&
            (ident_char(text[j + 1]))) { j++; continue; }
        break;
      }
      std::string word = text.substr(i, j - i);
      bump(j - i);
      Tok k = keyword_arity().count(word) ? Tok::Keyword : Tok::Ident;
      out.push_back({k, word, tl, tc});
      continue;
    }
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", tl, tc}); bump(1); break;
      case ')': out.push_back({Tok::RParen, ")", tl, tc}); bump(1); break;
      case ',': out.push_back({Tok::Comma, ",", tl, tc}); bump(1); break;
      case '*': out.push_back({Tok::StarOp, "*", tl, tc}); bump(1); break;
      case ':':
        if (i + 1 < text.size() && text[i + 1] == '=') {
          out.push_back({Tok::ColonEq, ":=", tl, tc}); bump(2);
        } else {
          out.push_back({Tok::Colon, ":", tl, tc}); bump(1);
        }
        break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          out.push_back({Tok::Arrow, "->", tl, tc}); bump(2);
        } else {
          throw SyntaxError("stray '-'", tl, tc);
        }
        break;
      case '=':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          out.push_back({Tok::FatArrow, "=>", tl, tc}); bump(2);
        } else {
          throw SyntaxError("stray '='", tl, tc);
        }
        break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", tl, tc);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  std::vector<std::string> binders;               // innermost last
  std::vector<std::pair<std::string, Term>> defs;  // name -> spliceable closed term

  const Token& peek(int ahead = 0) const {
    size_t k = pos + ahead;
    return k < toks.size() ? toks[k] : toks.back();
  }
  Token next() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_keyword(const char* w) const {
    return peek().kind == Tok::Keyword && peek().text == w;
  }
  Token expect(Tok k, const char* what) {
    if (!at(k)) {
      throw SyntaxError(std::string("expected ") + what + ", found '" +
                            (peek().kind == Tok::End ? "end of input" : peek().text) + "'",
                        peek().line, peek().col);
    }
    return next();
  }

  const Term* lookup_def(const std::string& name) const {
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
      if (it->first == name) return &it->second;
    }
    return nullptr;
  }

  Term parse_term() {  // arrow level
    // Dependent arrow needs lookahead past the closing paren.
    if (at(Tok::LParen) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Colon) {
      size_t save = pos;
      next();  // (
      std::string name = next().text;
      next();  // :
      Term dom = parse_term();
      expect(Tok::RParen, "')'");
      if (at(Tok::Arrow)) {
        next();
        binders.push_back(name);
        Term cod = parse_term();
        binders.pop_back();
        return build::pi(dom, cod);
      }
      pos = save;  // plain annotation; reparse as an atom
    }
    Term lhs = parse_star();
    if (at(Tok::Arrow)) {
      next();
      binders.push_back("_");  // non-dependent: binder invisible to scope
      Term cod = parse_term();
      binders.pop_back();
      return build::pi(lhs, cod);
    }
    return lhs;
  }

  Term parse_star() {
    Term lhs = parse_app();
    if (at(Tok::StarOp)) {
      next();
      binders.push_back("_");
      Term rhs = parse_star();
      binders.pop_back();
      return build::sigma(lhs, rhs);
    }
    return lhs;
  }

  bool at_atom_start() const {
    switch (peek().kind) {
      case Tok::LParen: case Tok::Ident: return true;
      case Tok::Keyword: return peek().text != "def";
      default: return false;
    }
  }

  Term parse_app() {
    Term head = parse_atom();
    while (at_atom_start()) head = build::app(head, parse_atom());
    return head;
  }

  std::vector<Term> keyword_args(const Token& kw, int arity) {
    std::vector<Term> args;
    if (arity >= 2 && at(Tok::LParen)) {
      next();
      args.push_back(parse_term());
      if (at(Tok::Comma)) {
        while (at(Tok::Comma)) { next(); args.push_back(parse_term()); }
        expect(Tok::RParen, "')'");
        if (static_cast<int>(args.size()) != arity) {
          throw SyntaxError(kw.text + " takes " + std::to_string(arity) + " arguments, got " +
                                std::to_string(args.size()),
                            kw.line, kw.col);
        }
        return args;
      }
      expect(Tok::RParen, "')' or ','");
    }
    while (static_cast<int>(args.size()) < arity) args.push_back(parse_atom());
    return args;
  }

  Term parse_keyword_form(const Token& kw) {
    const std::string& w = kw.text;
    if (w == "fun") {
      std::string name = expect(Tok::Ident, "binder name").text;
      expect(Tok::FatArrow, "'=>'");
      binders.push_back(name);
      Term body = parse_term();
      binders.pop_back();
      return build::lam(body);
    }
    if (w == "Sig") {
      expect(Tok::LParen, "'('");
      std::string name = expect(Tok::Ident, "binder name").text;
      expect(Tok::Colon, "':'");
      Term fst = parse_term();
      expect(Tok::RParen, "')'");
      binders.push_back(name);
      Term snd = parse_term();
      binders.pop_back();
      return build::sigma(fst, snd);
    }
    if (w == "Type") return build::type_kind();
    if (w == "Unit") return build::unit();
    if (w == "Empty") return build::empty();
    if (w == "star") return build::star();
    if (w == "funext" || w == "pglue-beta") return build::constant(w);

    int arity = keyword_arity().at(w);
    auto a = keyword_args(kw, arity);
    using namespace build;
    if (w == "fst") return fst(a[0]);
    if (w == "snd") return snd(a[0]);
    if (w == "Id") return id(a[0], a[1], a[2]);
    if (w == "refl") return refl(a[0]);
    if (w == "J") return j(a[0], a[1], a[2], a[3]);
    if (w == "absurd") return absurd(a[0], a[1]);
    if (w == "Sum") return sum(a[0], a[1]);
    if (w == "inl") return inl(a[0]);
    if (w == "inr") return inr(a[0]);
    if (w == "case") return case_(a[0], a[1], a[2], a[3]);
    if (w == "Push") return push(a[0], a[1], a[2], a[3], a[4]);
    if (w == "pinl") return pinl(a[0]);
    if (w == "pinr") return pinr(a[0]);
    if (w == "pglue") return pglue(a[0]);
    if (w == "pind") return pind(a[0], a[1], a[2], a[3], a[4]);
    if (w == "JType") return jt(a[0], a[1], a[2], a[3], a[4]);
    if (w == "alpha") return jalpha(a[0]);
    if (w == "ext") return jext(a[0], a[1], a[2]);
    if (w == "isext") return jisext(a[0], a[1], a[2]);
    if (w == "jind") return jind(a[0], a[1], a[2], a[3], a[4]);
    throw SyntaxError("unexpected keyword '" + w + "'", kw.line, kw.col);
  }

  Term parse_atom() {
    const Token tok = peek();
    switch (tok.kind) {
      case Tok::LParen: {
        next();
        Term t = parse_term();
        if (at(Tok::Colon)) {
          next();
          Term ty = parse_term();
          expect(Tok::RParen, "')'");
          return build::ann(t, ty);
        }
        if (at(Tok::Comma)) {
          next();
          Term s = parse_term();
          expect(Tok::RParen, "')'");
          return build::pair(t, s);
        }
        expect(Tok::RParen, "')'");
        return t;
      }
      case Tok::Ident: {
        next();
        for (int i = static_cast<int>(binders.size()) - 1; i >= 0; --i) {
          if (binders[i] != "_" && binders[i] == tok.text) {
            return build::var(static_cast<int>(binders.size()) - 1 - i);
          }
        }
        if (const Term* d = lookup_def(tok.text)) return *d;
        throw ScopeError("unbound name '" + tok.text + "'", tok.line, tok.col);
      }
      case Tok::Keyword: {
        next();
        return parse_keyword_form(tok);
      }
      default:
        throw SyntaxError("expected a term, found '" +
                              (tok.kind == Tok::End ? "end of input" : tok.text) + "'",
                          tok.line, tok.col);
    }
  }

  SourceFile parse_file() {
    SourceFile out;
    while (!at(Tok::End)) {
      Token kw = peek();
      if (!at_keyword("def")) {
        throw SyntaxError("expected 'def', found '" + kw.text + "'", kw.line, kw.col);
      }
      next();
      Token nameTok = expect(Tok::Ident, "definition name");
      for (const auto& d : defs) {
        if (d.first == nameTok.text) {
          throw DuplicateName("duplicate definition '" + nameTok.text + "'", nameTok.line,
                              nameTok.col);
        }
      }
      Term classifier;
      if (at(Tok::ColonEq)) {
        // Missing classifier: parse the body anyway so that a truncated body
        // is reported as such before the missing annotation is.
        Token eq = peek();
        next();
        parse_term();
        throw SyntaxError("definition '" + nameTok.text + "' needs a ': TYPE' annotation",
                          eq.line, eq.col);
      }
      expect(Tok::Colon, "':'");
      classifier = parse_term();
      expect(Tok::ColonEq, "':='");
      Term body = parse_term();
      out.defs.push_back({nameTok.text, classifier, body, nameTok.line});
      // Later definitions see this one as an annotated closed term.
      defs.emplace_back(nameTok.text, build::ann(body, classifier));
    }
    return out;
  }
};

}  // namespace

SourceFile parse(const std::string& text) {
  Parser p{tokenize(text)};
  return p.parse_file();
}

Term parse_term(const std::string& text) {
  Parser p{tokenize(text)};
  Term t = p.parse_term();
  p.expect(Tok::End, "end of input");
  return t;
}

}  // namespace modal::tt
