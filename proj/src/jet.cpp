#include "schlafli/jet.hpp"

#include <vector>

namespace schlafli {
namespace {

struct Tables {
  // Multi-indices sorted by total degree; prefix_[k] = number with degree <= k.
  std::array<std::array<int, 3>, Taylor::kSize> exps{};
  std::array<int, Taylor::kSize> degree{};
  int index[4][4][4]{};
  std::array<int, Taylor::kMaxOrder + 1> prefix{};
  struct Term {
    int i, j, k, deg;
  };
  std::vector<Term> products;  // sorted by deg

  Tables() {
    int n = 0;
    for (int d = 0; d <= Taylor::kMaxOrder; ++d) {
      for (int a = d; a >= 0; --a) {
        for (int b = d - a; b >= 0; --b) {
          const int c = d - a - b;
          exps[n] = {a, b, c};
          degree[n] = d;
          index[a][b][c] = n;
          ++n;
        }
      }
      prefix[d] = n;
    }
    for (int d = 0; d <= Taylor::kMaxOrder; ++d) {
      for (int i = 0; i < Taylor::kSize; ++i) {
        for (int j = 0; j < Taylor::kSize; ++j) {
          if (degree[i] + degree[j] != d) continue;
          const auto& ei = exps[i];
          const auto& ej = exps[j];
          products.push_back({i, j, index[ei[0] + ej[0]][ei[1] + ej[1]][ei[2] + ej[2]], d});
        }
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

Taylor Taylor::variable(int var, double value, int order) {
  Taylor x(value);
  x.order_ = order;
  if (order >= 1) {
    int e[3] = {0, 0, 0};
    e[var] = 1;
    x.c_[tables().index[e[0]][e[1]][e[2]]] = 1.0;
  }
  return x;
}

double Taylor::coeff(int a, int b, int c) const {
  if (a < 0 || b < 0 || c < 0 || a + b + c > order_) return 0.0;
  return c_[tables().index[a][b][c]];
}

double Taylor::derivative(int a, int b, int c) const {
  return coeff(a, b, c) * factorial(a) * factorial(b) * factorial(c);
}

Taylor Taylor::diff(int var) const {
  const auto& tb = tables();
  Taylor r;
  r.order_ = order_ > 0 ? order_ - 1 : 0;
  if (order_ == 0) return r;
  for (int n = 0; n < tb.prefix[order_]; ++n) {
    auto e = tb.exps[n];
    if (e[var] == 0) continue;
    const double k = e[var];
    e[var] -= 1;
    r.c_[tb.index[e[0]][e[1]][e[2]]] = k * c_[n];
  }
  return r;
}

Taylor Taylor::truncated(int order) const {
  Taylor r = *this;
  if (order >= order_) return r;
  r.order_ = order;
  for (int n = tables().prefix[order]; n < kSize; ++n) r.c_[n] = 0.0;
  return r;
}

Taylor& Taylor::operator+=(const Taylor& o) {
  order_ = std::min(order_, o.order_);
  for (int n = 0; n < kSize; ++n) c_[n] += o.c_[n];
  return *this = truncated(order_);
}

Taylor& Taylor::operator-=(const Taylor& o) {
  order_ = std::min(order_, o.order_);
  for (int n = 0; n < kSize; ++n) c_[n] -= o.c_[n];
  return *this = truncated(order_);
}

Taylor& Taylor::operator*=(const Taylor& o) {
  const int order = std::min(order_, o.order_);
  std::array<double, kSize> r{};
  for (const auto& term : tables().products) {
    if (term.deg > order) break;
    r[term.k] += c_[term.i] * o.c_[term.j];
  }
  c_ = r;
  order_ = order;
  return *this;
}

Taylor& Taylor::operator/=(const Taylor& o) {
  const double x = o.value();
  const double inv = 1.0 / x;
  return *this *= o.compose({inv, -inv * inv, 2.0 * inv * inv * inv, -6.0 * inv * inv * inv * inv});
}

Taylor Taylor::compose(const std::array<double, 4>& d) const {
  Taylor delta = *this;
  delta.c_[0] = 0.0;
  Taylor result(d[0]);
  result.order_ = order_;
  Taylor power = delta;
  for (int k = 1; k <= order_; ++k) {
    const double scale = d[k] / factorial(k);
    for (int n = 0; n < kSize; ++n) result.c_[n] += scale * power.c_[n];
    if (k < order_) power *= delta;
  }
  return result;
}

Taylor sin(const Taylor& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return x.compose({s, c, -s, -c});
}

Taylor cos(const Taylor& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return x.compose({c, -s, -c, s});
}

Taylor tan(const Taylor& x) { return sin(x) / cos(x); }

Taylor sinh(const Taylor& x) {
  const double s = std::sinh(x.value()), c = std::cosh(x.value());
  return x.compose({s, c, s, c});
}

Taylor cosh(const Taylor& x) {
  const double s = std::sinh(x.value()), c = std::cosh(x.value());
  return x.compose({c, s, c, s});
}

Taylor tanh(const Taylor& x) {
  const double t = std::tanh(x.value());
  const double s = 1.0 - t * t;
  return x.compose({t, s, -2.0 * t * s, -2.0 * s * (1.0 - 3.0 * t * t)});
}

Taylor exp(const Taylor& x) {
  const double e = std::exp(x.value());
  return x.compose({e, e, e, e});
}

Taylor log(const Taylor& x) {
  const double v = x.value();
  const double i = 1.0 / v;
  return x.compose({std::log(v), i, -i * i, 2.0 * i * i * i});
}

Taylor sqrt(const Taylor& x) {
  const double s = std::sqrt(x.value());
  const double v = x.value();
  return x.compose({s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v)});
}

Taylor pow(const Taylor& x, double p) {
  const double v = x.value();
  return x.compose({std::pow(v, p), p * std::pow(v, p - 1.0), p * (p - 1.0) * std::pow(v, p - 2.0),
                    p * (p - 1.0) * (p - 2.0) * std::pow(v, p - 3.0)});
}

Taylor pow(const Taylor& x, const Taylor& p) {
  if (p.order() == Taylor::kMaxOrder) {
    bool constant = true;
    for (int a = 0; a <= 3 && constant; ++a)
      for (int b = 0; a + b <= 3 && constant; ++b)
        for (int c = 0; a + b + c <= 3; ++c)
          if (a + b + c > 0 && p.coeff(a, b, c) != 0.0) constant = false;
    if (constant) return pow(x, p.value());
  }
  return exp(p * log(x));
}

Taylor atan(const Taylor& x) {
  const double v = x.value();
  const double q = 1.0 / (1.0 + v * v);
  return x.compose({std::atan(v), q, -2.0 * v * q * q, (6.0 * v * v - 2.0) * q * q * q});
}

Taylor atan2(const Taylor& y, const Taylor& x) {
  const double y0 = y.value(), x0 = x.value();
  const Taylor num = x0 * y - y0 * x;
  const Taylor den = x0 * x + y0 * y;
  // num has zero constant term, den has constant term x0^2 + y0^2 > 0.
  return std::atan2(y0, x0) + atan(num / den);
}

Taylor asin(const Taylor& x) {
  const double v = x.value();
  const double w = 1.0 - v * v;
  const double r = 1.0 / std::sqrt(w);
  return x.compose({std::asin(v), r, v * r / w, (1.0 + 2.0 * v * v) * r / (w * w)});
}

Taylor acos(const Taylor& x) {
  const double v = x.value();
  const double w = 1.0 - v * v;
  const double r = 1.0 / std::sqrt(w);
  return x.compose({std::acos(v), -r, -v * r / w, -(1.0 + 2.0 * v * v) * r / (w * w)});
}

Taylor asinh(const Taylor& x) {
  const double v = x.value();
  const double w = 1.0 + v * v;
  const double r = 1.0 / std::sqrt(w);
  return x.compose({std::asinh(v), r, -v * r / w, (2.0 * v * v - 1.0) * r / (w * w)});
}

Taylor acosh(const Taylor& x) {
  const double v = x.value();
  const double w = v * v - 1.0;
  const double r = 1.0 / std::sqrt(w);
  return x.compose({std::acosh(v), r, -v * r / w, (2.0 * v * v + 1.0) * r / (w * w)});
}

}  // namespace schlafli
