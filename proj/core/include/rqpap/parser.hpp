// ============================================================================
//  rqpap/parser.hpp — concrete syntax for terms and model files
//
//  Term grammar, tightest binding first:
//      history suffix   a[3]   a[~]        (on action names only)
//      sequential       x . y               (right-associative)
//      parallel family  x | y   x >< y   x ## y   x || y
//                       (one level, left-associative; mixing different
//                        parallel operators without parentheses is an error)
//      alternative      x + y               (loosest)
//  Unary forms: encap{a,b}(t), abs{a,b}(t), <X|specname>.
//  Keywords: delta, tau, encap, abs.
//
//  Model files (.rqp) are ;-terminated statements:
//      comm a, b;                      declare communication actions
//      qop M_qa;                       declare quantum operations
//      gamma(send, receive) = c;       synchronisation function
//      spec NAME { X = term; ... }     guarded recursive specification
//      term NAME = term;               named top-level term
//      effect M = measure(std, q0);    quantum effect for a qop
//      effect U = unitary(hadamard, q0);
//      state bell(1) * ground(1);      concrete initial state (tensor parts)
//  '//' starts a comment to end of line.
// ============================================================================
#pragma once

#include <stdexcept>
#include <string>

#include "rqpap/model.hpp"
#include "rqpap/term.hpp"

namespace rqpap {

struct SourceSpan {
  int line = 1;    ///< 1-based
  int column = 1;  ///< 1-based
  int length = 1;  ///< >= 1
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, SourceSpan span)
      : std::runtime_error(what), span_(span) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

/// Parses one term.  Names are classified by the model's declarations
/// (undeclared names default to communication actions); <X|S> requires S
/// among model.specs.  Throws ParseError.
TermPtr parse_term(const std::string& text, const Model& model);

/// Parses a sequence of `X = term;` equations into a recursive
/// specification named `name`, validating guardedness and rejecting
/// duplicate definitions.  Throws ParseError.
RecSpecPtr parse_spec(const std::string& name, const std::string& text,
                      const Model& model);

/// Parses a whole model file / text.  Statements are processed top to
/// bottom, so terms may only reference specs declared above them.
Model parse_model_text(const std::string& text);
Model parse_model_file(const std::string& path);

/// Renders with minimal parentheses (plus grouping parentheses around
/// sequential compositions under parallel operators, for readability).
/// Law: parse_term(render(t), m) is ac_equal to t.
std::string render(const TermPtr& t);

}  // namespace rqpap
