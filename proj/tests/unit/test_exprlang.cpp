#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "schlafli/error.hpp"
#include "schlafli/exprlang.hpp"

using namespace schlafli;

TEST_CASE("parse examples") {
  const auto p = ExprProgram::parse("cosh(t)*sin(u)");
  CHECK(p.free_variables() == std::set<std::string>{"t", "u"});
  CHECK(p.arity() == 1);

  try {
    ExprProgram::parse("sin(u");
    FAIL("expected SyntaxError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SyntaxError);
    CHECK(e.line() == 1);
    CHECK(e.column() == 6);
  }
  try {
    ExprProgram::parse("foo(u)");
    FAIL("expected UnknownIdentifier");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownIdentifier);
    CHECK(e.column() == 1);
  }
  CHECK_THROWS_AS(ExprProgram::parse("u + w"), Error);
  CHECK_NOTHROW(ExprProgram::parse("u + w", {"w"}));
}

TEST_CASE("precedence and associativity") {
  CHECK(ExprProgram::parse("2^3^2").eval(0) == doctest::Approx(512.0));
  CHECK(ExprProgram::parse("-2^2").eval(0) == doctest::Approx(-4.0));
  CHECK(ExprProgram::parse("1 - 2 - 3").eval(0) == doctest::Approx(-4.0));
  CHECK(ExprProgram::parse("8 / 4 / 2").eval(0) == doctest::Approx(1.0));
  CHECK(ExprProgram::parse("2 + 3 * 4").eval(0) == doctest::Approx(14.0));
  CHECK(ExprProgram::parse("2^-1").eval(0) == doctest::Approx(0.5));
  CHECK(ExprProgram::parse("atan2(1, 1)").eval(0) == doctest::Approx(std::atan(1.0)));
  CHECK(ExprProgram::parse("pow(u, 3)").eval(2) == doctest::Approx(8.0));
  CHECK(ExprProgram::parse("1e-3 * 2.5E2").eval(0) == doctest::Approx(0.25));
}

TEST_CASE("vector programs and parameters") {
  const auto p = ExprProgram::parse("[a*cos(u), a*sin(u), v]", {"a"});
  CHECK(p.arity() == 3);
  const auto out = p.eval_vector(0.0, 2.0, 0.0, {{"a", 3.0}});
  CHECK(out[0] == doctest::Approx(3.0));
  CHECK(out[2] == doctest::Approx(2.0));
}

TEST_CASE("print round trip") {
  for (const char* src : {"cosh(t)*sin(u)", "[1, -u^2, 2^3^u]", "a/(b-c)*pi + e", "-(-u)", "atan2(v, u - 0.1)",
                          "1/3", "sqrt(u^2 + v^2)"}) {
    const auto p = ExprProgram::parse(src, {"a", "b", "c"});
    const auto q = ExprProgram::parse(p.print(), {"a", "b", "c"});
    CHECK(q.print() == p.print());
  }
}

TEST_CASE("jet examples") {
  auto j = eval_jet(ExprProgram::parse("u*v"), 2, 3, 0);
  CHECK(j.value == 6);
  CHECK(j.du == 3);
  CHECK(j.dv == 2);
  CHECK(j.duv == 1);
  CHECK(j.duu == 0);
  j = eval_jet(ExprProgram::parse("sin(u)"), 0, 0, 0);
  CHECK(j.value == 0);
  CHECK(j.du == doctest::Approx(1.0));
  CHECK(j.duu == 0);
  j = eval_jet(ExprProgram::parse("cosh(t)"), 0, 0, 1);
  CHECK(j.dt == doctest::Approx(1.1752011936438014).epsilon(1e-14));
}

TEST_CASE("domain errors") {
  for (const char* src : {"log(u)", "sqrt(u - 1)", "1/u", "atan2(u, u)"}) {
    try {
      ExprProgram::parse(src).eval(0.0);
      FAIL("expected DomainError for " << src);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DomainError);
    }
  }
}

namespace {

// Random program generator biased toward expressions that stay finite on
// the sampling box.
std::string random_expr(std::mt19937_64& g, int depth) {
  std::uniform_int_distribution<int> pick(0, 11);
  const char* vars[] = {"u", "v", "t"};
  if (depth == 0) {
    const int k = pick(g) % 4;
    if (k == 3) return "0." + std::to_string(2 + static_cast<int>(g() % 8)) + "5";
    return vars[k];
  }
  const std::string a = random_expr(g, depth - 1);
  const std::string b = random_expr(g, depth - 1);
  switch (pick(g)) {
    case 0: return "(" + a + " + " + b + ")";
    case 1: return "(" + a + " - " + b + ")";
    case 2: return "(" + a + " * " + b + ")";
    case 3: return "(" + a + ") / (2 + cos(" + b + "))";
    case 4: return "sin(" + a + ")";
    case 5: return "cos(" + a + ")";
    case 6: return "tanh(" + a + ")";
    case 7: return "exp(0.3 * sin(" + a + "))";
    case 8: return "log(1.5 + sin(" + a + "))";
    case 9: return "sqrt(1 + (" + a + ")^2)";
    case 10: return "atan2(" + a + ", 2 + cos(" + b + "))";
    default: return "sinh(0.5 * cos(" + a + ")) * cosh(0.3 * " + b + ")";
  }
}

}  // namespace

TEST_CASE("jets agree with finite differences on random programs") {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> x(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto prog = ExprProgram::parse(random_expr(g, 1 + trial % 4));
    const double u = x(g), v = x(g), t = x(g);
    const auto j = eval_jet(prog, u, v, t);
    auto f = [&](double du, double dv, double dt) { return prog.eval(u + du, v + dv, t + dt); };
    // Richardson-extrapolated central differences (steps h and h/2).
    auto rich = [](auto d, double h) { return (4.0 * d(h / 2) - d(h)) / 3.0; };
    auto first = [&](int axis) {
      return rich(
          [&](double h) {
            const double e[3] = {axis == 0 ? h : 0, axis == 1 ? h : 0, axis == 2 ? h : 0};
            return (f(e[0], e[1], e[2]) - f(-e[0], -e[1], -e[2])) / (2 * h);
          },
          1e-3);
    };
    auto second = [&](int a, int b) {
      return rich(
          [&](double h) {
            if (a == b) {
              const double e[2] = {a == 0 ? h : 0, a == 1 ? h : 0};
              return (f(e[0], e[1], 0) - 2 * f(0, 0, 0) + f(-e[0], -e[1], 0)) / (h * h);
            }
            return (f(h, h, 0) - f(h, -h, 0) - f(-h, h, 0) + f(-h, -h, 0)) / (4 * h * h);
          },
          4e-3);
    };
    const double scale = 1.0 + std::abs(j.value);
    INFO(prog.print() << " at " << u << "," << v << "," << t);
    CHECK(std::abs(j.du - first(0)) <= 1e-6 * scale);
    CHECK(std::abs(j.dv - first(1)) <= 1e-6 * scale);
    CHECK(std::abs(j.dt - first(2)) <= 1e-6 * scale);
    CHECK(std::abs(j.duu - second(0, 0)) <= 1e-6 * scale);
    CHECK(std::abs(j.dvv - second(1, 1)) <= 1e-6 * scale);
    CHECK(std::abs(j.duv - second(0, 1)) <= 1e-6 * scale);
  }
}

TEST_CASE("parser fuzz never crashes and always reports a position") {
  std::mt19937_64 g(99);
  const std::string alphabet = "uvt+-*/^(),[]. 0123456789esinpqrtcohxlgaw\n";
  int rejected = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    std::string s;
    const int n = 1 + static_cast<int>(g() % 24);
    for (int i = 0; i < n; ++i) s += alphabet[g() % alphabet.size()];
    try {
      const auto p = ExprProgram::parse(s);
      (void)p.print();
    } catch (const Error& e) {
      ++rejected;
      CHECK(e.line() >= 1);
      CHECK(e.column() >= 1);
    }
  }
  CHECK(rejected > 0);
  CHECK_THROWS_AS(ExprProgram::parse(std::string(5000, '(')), Error);
}
