#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "schlafli/jet.hpp"

namespace schlafli {

using ParamMap = std::map<std::string, double, std::less<>>;

/// Value and chart derivatives of an expression at one point.
struct JetValue {
  double value = 0.0;
  double du = 0.0, dv = 0.0, dt = 0.0;
  double duu = 0.0, duv = 0.0, dvv = 0.0;
};

/// A parsed expression over the variables u, v, t, the constants pi and e,
/// and a declared set of named parameters.
///
/// Grammar (standard precedence, `^` right-associative and binding tighter
/// than unary minus):
///
///     program := '[' expr (',' expr)* ']' | expr
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := ('+' | '-') unary | power
///     power   := primary ('^' unary)?
///     primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Functions: sin cos sinh cosh tanh exp log sqrt pow atan2.
class ExprProgram {
 public:
  /// Throws Error{SyntaxError | UnknownIdentifier} with 1-based line/column.
  static ExprProgram parse(std::string_view source, const std::vector<std::string>& params = {});

  const std::string& source() const noexcept { return source_; }
  const std::vector<std::string>& parameters() const noexcept { return params_; }
  std::size_t arity() const noexcept { return outputs_.size(); }
  /// Variables and parameters the program actually references.
  std::set<std::string> free_variables() const;

  /// Canonical fully parenthesized text; parse(print()) prints identically.
  std::string print() const;

  double eval(double u, double v = 0.0, double t = 0.0, const ParamMap& params = {}) const;
  std::vector<double> eval_vector(double u, double v = 0.0, double t = 0.0,
                                  const ParamMap& params = {}) const;
  std::vector<Taylor> eval_taylor(const Taylor& u, const Taylor& v, const Taylor& t,
                                  const ParamMap& params = {}) const;

  struct Node;

 private:
  std::string source_;
  std::vector<std::string> params_;
  std::shared_ptr<const std::vector<Node>> nodes_;
  std::vector<int> outputs_;
};

/// Exact first/second chart derivatives (scalar program).
JetValue eval_jet(const ExprProgram& prog, double u, double v, double t, const ParamMap& params = {});
std::vector<JetValue> eval_jet_vector(const ExprProgram& prog, double u, double v, double t,
                                      const ParamMap& params = {});

}  // namespace schlafli
