#pragma once

#include <exception>
#include <string>
#include <vector>

#include "modal/term.hpp"

namespace modal::tt {

// A checked input file: an ordered list of named definitions.  Classifier and
// body are closed terms; references to earlier definitions have already been
// replaced by their (annotated) bodies, so no global environment survives
// parsing.  A classifier is either a type or a kind (see is_kind_syntax).
struct Definition {
  std::string name;
  Term classifier;
  Term body;
  int line = 0;
};

struct SourceFile {
  std::vector<Definition> defs;
};

struct ParseError : std::exception {
  std::string kind;  // SyntaxError | ScopeError | DuplicateName
  std::string detail;
  int line = 0, col = 0;
  std::string rendered;
  ParseError(std::string k, std::string d, int l, int c)
      : kind(std::move(k)), detail(std::move(d)), line(l), col(c) {
    rendered = kind + " at " + std::to_string(line) + ":" + std::to_string(col) + ": " + detail;
  }
  const char* what() const noexcept override { return rendered.c_str(); }
};

struct SyntaxError : ParseError {
  SyntaxError(std::string d, int l, int c) : ParseError("SyntaxError", std::move(d), l, c) {}
};
struct ScopeError : ParseError {
  ScopeError(std::string d, int l, int c) : ParseError("ScopeError", std::move(d), l, c) {}
};
struct DuplicateName : ParseError {
  DuplicateName(std::string d, int l, int c)
      : ParseError("DuplicateName", std::move(d), l, c) {}
};

// Parse a whole file of `def name : CLASSIFIER := TERM` items.
SourceFile parse(const std::string& text);

// Parse a single closed term (the printer's output parses back with this).
Term parse_term(const std::string& text);

}  // namespace modal::tt
