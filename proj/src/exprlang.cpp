#include "schlafli/exprlang.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "schlafli/error.hpp"

namespace schlafli {

enum class Op { Number, Var, Param, Named, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Sin, Cos, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Pow, Atan2 };

struct ExprProgram::Node {
  Op op{};
  double number = 0.0;  // Number / Named
  int index = 0;        // Var: 0=u 1=v 2=t, Param: slot, Named: 0=pi 1=e, Call: Func
  std::vector<int> args;
  int line = 1, column = 1;
};

namespace {

struct FuncInfo {
  const char* name;
  Func func;
  int arity;
};

constexpr std::array<FuncInfo, 10> kFunctions{{
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"sinh", Func::Sinh, 1},
    {"cosh", Func::Cosh, 1},
    {"tanh", Func::Tanh, 1},
    {"exp", Func::Exp, 1},
    {"log", Func::Log, 1},
    {"sqrt", Func::Sqrt, 1},
    {"pow", Func::Pow, 2},
    {"atan2", Func::Atan2, 2},
}};

constexpr int kMaxDepth = 256;

enum class Tok { Number, Name, Op, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  int line, column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", 0.0, line_, col_});
        return out;
      }
      const char ch = src_[pos_];
      const int line = line_, col = col_;
      if (std::isdigit(static_cast<unsigned char>(ch)) || (ch == '.' && pos_ + 1 < src_.size() &&
                                                          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        out.push_back(number(line, col));
      } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        out.push_back({Tok::Name, std::string(src_.substr(start, pos_ - start)), 0.0, line, col});
      } else if (std::string_view("+-*/^(),[]").find(ch) != std::string_view::npos) {
        advance();
        out.push_back({Tok::Op, std::string(1, ch), 0.0, line, col});
      } else {
        throw Error(ErrorKind::SyntaxError,
                    "unexpected character at line " + std::to_string(line) + ", column " + std::to_string(col),
                    line, col);
      }
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  Token number(int line, int col) {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        while (pos_ < look) advance();
        digits();
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    return {Tok::Number, text, std::strtod(text.c_str(), nullptr), line, col};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::vector<std::string>& params, std::vector<ExprProgram::Node>& nodes)
      : toks_(std::move(toks)), params_(params), nodes_(nodes) {}

  std::vector<int> program() {
    std::vector<int> outputs;
    if (is_op("[")) {
      next();
      outputs.push_back(expr());
      while (is_op(",")) {
        next();
        outputs.push_back(expr());
      }
      expect("]");
    } else {
      outputs.push_back(expr());
    }
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return outputs;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_op(const char* s) const { return peek().kind == Tok::Op && peek().text == s; }

  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    throw Error(ErrorKind::SyntaxError,
                msg + " at line " + std::to_string(t.line) + ", column " + std::to_string(t.column), t.line,
                t.column);
  }

  void expect(const char* s) {
    if (!is_op(s)) fail(std::string("expected '") + s + "'" + (peek().kind == Tok::End ? " before end of input" : ""));
    next();
  }

  int add(ExprProgram::Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int binary(Op op, int lhs, int rhs, const Token& at) {
    ExprProgram::Node n;
    n.op = op;
    n.args = {lhs, rhs};
    n.line = at.line;
    n.column = at.column;
    return add(std::move(n));
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) p.fail("expression nested too deeply");
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  int expr() {
    DepthGuard guard(*this);
    int lhs = term();
    while (is_op("+") || is_op("-")) {
      const Token t = next();
      const int rhs = term();
      lhs = binary(t.text == "+" ? Op::Add : Op::Sub, lhs, rhs, t);
    }
    return lhs;
  }

  int term() {
    int lhs = unary();
    while (is_op("*") || is_op("/")) {
      const Token t = next();
      const int rhs = unary();
      lhs = binary(t.text == "*" ? Op::Mul : Op::Div, lhs, rhs, t);
    }
    return lhs;
  }

  int unary() {
    DepthGuard guard(*this);
    if (is_op("-") || is_op("+")) {
      const Token t = next();
      const int operand = unary();
      if (t.text == "+") return operand;
      ExprProgram::Node n;
      n.op = Op::Neg;
      n.args = {operand};
      n.line = t.line;
      n.column = t.column;
      return add(std::move(n));
    }
    return power();
  }

  int power() {
    const int base = primary();
    if (is_op("^")) {
      const Token t = next();
      const int exponent = unary();
      return binary(Op::Pow, base, exponent, t);
    }
    return base;
  }

  int primary() {
    const Token t = peek();
    if (t.kind == Tok::Number) {
      next();
      ExprProgram::Node n;
      n.op = Op::Number;
      n.number = t.number;
      n.line = t.line;
      n.column = t.column;
      return add(std::move(n));
    }
    if (t.kind == Tok::Name) {
      next();
      if (is_op("(")) return call(t);
      ExprProgram::Node n;
      n.op = Op::Var;
      n.line = t.line;
      n.column = t.column;
      if (t.text == "u" || t.text == "v" || t.text == "t") {
        n.index = t.text == "u" ? 0 : (t.text == "v" ? 1 : 2);
      } else if (t.text == "pi" || t.text == "e") {
        n.op = Op::Named;
        n.index = t.text == "pi" ? 0 : 1;
        n.number = t.text == "pi" ? std::numbers::pi : std::numbers::e;
      } else {
        const auto it = std::find(params_.begin(), params_.end(), t.text);
        if (it == params_.end())
          throw Error(ErrorKind::UnknownIdentifier,
                      "'" + t.text + "' at line " + std::to_string(t.line) + ", column " + std::to_string(t.column),
                      t.line, t.column);
        n.op = Op::Param;
        n.index = static_cast<int>(it - params_.begin());
      }
      return add(std::move(n));
    }
    if (is_op("(")) {
      next();
      const int inner = expr();
      expect(")");
      return inner;
    }
    if (t.kind == Tok::End) fail("unexpected end of input");
    fail("unexpected '" + t.text + "'");
  }

  int call(const Token& name) {
    const auto it = std::find_if(kFunctions.begin(), kFunctions.end(),
                                 [&](const FuncInfo& f) { return name.text == f.name; });
    if (it == kFunctions.end())
      throw Error(ErrorKind::UnknownIdentifier,
                  "function '" + name.text + "' at line " + std::to_string(name.line) + ", column " +
                      std::to_string(name.column),
                  name.line, name.column);
    expect("(");
    ExprProgram::Node n;
      n.op = Op::Call;
    n.index = static_cast<int>(it->func);
    n.line = name.line;
    n.column = name.column;
    n.args.push_back(expr());
    while (is_op(",")) {
      next();
      n.args.push_back(expr());
    }
    expect(")");
    if (static_cast<int>(n.args.size()) != it->arity)
      throw Error(ErrorKind::SyntaxError,
                  std::string(it->name) + " expects " + std::to_string(it->arity) + " argument(s) at line " +
                      std::to_string(name.line) + ", column " + std::to_string(name.column),
                  name.line, name.column);
    return add(std::move(n));
  }

  std::vector<Token> toks_;
  const std::vector<std::string>& params_;
  std::vector<ExprProgram::Node>& nodes_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

[[noreturn]] void domain_error(const ExprProgram::Node& n, const std::string& what) {
  throw Error(ErrorKind::DomainError,
              what + " at line " + std::to_string(n.line) + ", column " + std::to_string(n.column), n.line,
              n.column);
}

double pow_scalar(const ExprProgram::Node& n, double base, double p) {
  if (base < 0.0 && p != std::floor(p)) domain_error(n, "negative base with non-integer exponent");
  if (base == 0.0 && p < 0.0) domain_error(n, "zero to a negative power");
  return std::pow(base, p);
}

Taylor pow_scalar(const ExprProgram::Node& n, const Taylor& base, const Taylor& p) {
  const bool const_exp = p.order() == Taylor::kMaxOrder && p.du() == 0.0 && p.dv() == 0.0 && p.dt() == 0.0 &&
                         p.duu() == 0.0 && p.duv() == 0.0 && p.dvv() == 0.0 && p.derivative(0, 0, 2) == 0.0;
  if (const_exp) {
    const double e = p.value();
    if (base.value() < 0.0 && e != std::floor(e)) domain_error(n, "negative base with non-integer exponent");
    if (base.value() == 0.0 && (e < Taylor::kMaxOrder && e != std::floor(e)))
      domain_error(n, "power not differentiable at zero");
    if (base.value() == 0.0 && e < 0.0) domain_error(n, "zero to a negative power");
    if (base.value() == 0.0) {
      // Integer power of a polynomial with zero constant term.
      Taylor r(1.0);
      for (int i = 0; i < static_cast<int>(e); ++i) r *= base;
      return r;
    }
    return pow(base, e);
  }
  if (base.value() <= 0.0) domain_error(n, "variable exponent needs a positive base");
  return pow(base, p);
}

template <class T>
struct Evaluator {
  const std::vector<ExprProgram::Node>& nodes;
  const T vars[3];
  const std::vector<double>& params;

  T eval(int id) const {
    const auto& n = nodes[id];
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    using std::tanh;
    switch (n.op) {
      case Op::Number:
      case Op::Named: return T(n.number);
      case Op::Var: return vars[n.index];
      case Op::Param: return T(params[n.index]);
      case Op::Neg: return -eval(n.args[0]);
      case Op::Add: return eval(n.args[0]) + eval(n.args[1]);
      case Op::Sub: return eval(n.args[0]) - eval(n.args[1]);
      case Op::Mul: return eval(n.args[0]) * eval(n.args[1]);
      case Op::Div: {
        const T den = eval(n.args[1]);
        if (value_of(den) == 0.0) domain_error(n, "division by zero");
        return eval(n.args[0]) / den;
      }
      case Op::Pow: return pow_scalar(n, eval(n.args[0]), eval(n.args[1]));
      case Op::Call: {
        const T a = eval(n.args[0]);
        switch (static_cast<Func>(n.index)) {
          case Func::Sin: return sin(a);
          case Func::Cos: return cos(a);
          case Func::Sinh: return sinh(a);
          case Func::Cosh: return cosh(a);
          case Func::Tanh: return tanh(a);
          case Func::Exp: return exp(a);
          case Func::Log:
            if (value_of(a) <= 0.0) domain_error(n, "log of non-positive value");
            return log(a);
          case Func::Sqrt:
            if (value_of(a) < 0.0) domain_error(n, "sqrt of negative value");
            if constexpr (!std::is_same_v<T, double>) {
              if (value_of(a) == 0.0) domain_error(n, "sqrt not differentiable at zero");
            }
            return sqrt(a);
          case Func::Pow: return pow_scalar(n, a, eval(n.args[1]));
          case Func::Atan2: {
            const T b = eval(n.args[1]);
            if (value_of(a) == 0.0 && value_of(b) == 0.0) domain_error(n, "atan2(0, 0)");
            using std::atan2;
            return atan2(a, b);
          }
        }
      }
    }
    domain_error(n, "corrupt expression");
  }
};

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void print_node(const std::vector<ExprProgram::Node>& nodes, const std::vector<std::string>& params, int id,
                std::string& out) {
  const auto& n = nodes[id];
  static const char* kVarNames[] = {"u", "v", "t"};
  switch (n.op) {
    case Op::Number: out += format_number(n.number); return;
    case Op::Named: out += n.index == 0 ? "pi" : "e"; return;
    case Op::Var: out += kVarNames[n.index]; return;
    case Op::Param: out += params[n.index]; return;
    case Op::Neg:
      out += "(-";
      print_node(nodes, params, n.args[0], out);
      out += ")";
      return;
    case Op::Call:
      out += kFunctions[n.index].name;
      out += "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(nodes, params, n.args[i], out);
      }
      out += ")";
      return;
    default: break;
  }
  const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? " * " : n.op == Op::Div ? " / " : " ^ ";
  out += "(";
  print_node(nodes, params, n.args[0], out);
  out += sym;
  print_node(nodes, params, n.args[1], out);
  out += ")";
}

}  // namespace

ExprProgram ExprProgram::parse(std::string_view source, const std::vector<std::string>& params) {
  for (const auto& p : params) {
    if (p == "u" || p == "v" || p == "t" || p == "pi" || p == "e" ||
        std::any_of(kFunctions.begin(), kFunctions.end(), [&](const FuncInfo& f) { return p == f.name; }))
      throw Error(ErrorKind::SyntaxError, "parameter name '" + p + "' is reserved");
  }
  ExprProgram prog;
  prog.source_ = std::string(source);
  prog.params_ = params;
  auto nodes = std::make_shared<std::vector<Node>>();
  Parser parser(Lexer(source).run(), prog.params_, *nodes);
  prog.outputs_ = parser.program();
  prog.nodes_ = std::move(nodes);
  return prog;
}

std::set<std::string> ExprProgram::free_variables() const {
  std::set<std::string> out;
  static const char* kVarNames[] = {"u", "v", "t"};
  for (const auto& n : *nodes_) {
    if (n.op == Op::Var) out.insert(kVarNames[n.index]);
    if (n.op == Op::Param) out.insert(params_[n.index]);
  }
  return out;
}

std::string ExprProgram::print() const {
  std::string out;
  if (outputs_.size() == 1) {
    print_node(*nodes_, params_, outputs_[0], out);
    return out;
  }
  out += "[";
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    if (i) out += ", ";
    print_node(*nodes_, params_, outputs_[i], out);
  }
  out += "]";
  return out;
}

namespace {

std::vector<double> resolve_params(const std::vector<std::string>& names, const ParamMap& values) {
  std::vector<double> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    const auto it = values.find(name);
    if (it == values.end()) throw Error(ErrorKind::UnknownIdentifier, "no value supplied for parameter '" + name + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

std::vector<double> ExprProgram::eval_vector(double u, double v, double t, const ParamMap& params) const {
  const auto p = resolve_params(params_, params);
  const Evaluator<double> ev{*nodes_, {u, v, t}, p};
  std::vector<double> out;
  out.reserve(outputs_.size());
  for (int id : outputs_) out.push_back(ev.eval(id));
  return out;
}

double ExprProgram::eval(double u, double v, double t, const ParamMap& params) const {
  if (outputs_.size() != 1) throw Error(ErrorKind::DimensionMismatch, "program is not scalar");
  return eval_vector(u, v, t, params)[0];
}

std::vector<Taylor> ExprProgram::eval_taylor(const Taylor& u, const Taylor& v, const Taylor& t,
                                             const ParamMap& params) const {
  const auto p = resolve_params(params_, params);
  const Evaluator<Taylor> ev{*nodes_, {u, v, t}, p};
  std::vector<Taylor> out;
  out.reserve(outputs_.size());
  for (int id : outputs_) out.push_back(ev.eval(id));
  return out;
}

std::vector<JetValue> eval_jet_vector(const ExprProgram& prog, double u, double v, double t,
                                      const ParamMap& params) {
  const auto ju = Taylor::variable(Taylor::U, u, 2);
  const auto jv = Taylor::variable(Taylor::V, v, 2);
  const auto jt = Taylor::variable(Taylor::T, t, 2);
  std::vector<JetValue> out;
  for (const auto& x : prog.eval_taylor(ju, jv, jt, params)) {
    out.push_back({x.value(), x.du(), x.dv(), x.dt(), x.duu(), x.duv(), x.dvv()});
  }
  return out;
}

JetValue eval_jet(const ExprProgram& prog, double u, double v, double t, const ParamMap& params) {
  if (prog.arity() != 1) throw Error(ErrorKind::DimensionMismatch, "program is not scalar");
  return eval_jet_vector(prog, u, v, t, params)[0];
}

}  // namespace schlafli
