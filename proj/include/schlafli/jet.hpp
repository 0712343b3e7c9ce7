#pragma once

#include <array>
#include <cmath>

namespace schlafli {

/// Truncated Taylor polynomial in the three chart variables (u, v, t), up to
/// total order 3. Forward-mode arithmetic on these gives exact derivatives of
/// composed expressions: coefficient c(a,b,c) multiplies du^a dv^b dt^c.
///
/// A value built from a plain double is treated as exact (it does not limit
/// the order of results); variables are seeded with an explicit order.
class Taylor {
 public:
  static constexpr int kVars = 3;
  static constexpr int kMaxOrder = 3;
  static constexpr int kSize = 20;

  enum Var : int { U = 0, V = 1, T = 2 };

  Taylor() = default;
  Taylor(double constant) { c_[0] = constant; }  // NOLINT(google-explicit-constructor)

  static Taylor variable(int var, double value, int order = kMaxOrder);

  int order() const noexcept { return order_; }
  double value() const noexcept { return c_[0]; }

  /// Raw Taylor coefficient of du^a dv^b dt^c.
  double coeff(int a, int b, int c) const;
  /// Partial derivative d^(a+b+c) / du^a dv^b dt^c at the expansion point.
  double derivative(int a, int b, int c) const;

  double du() const { return derivative(1, 0, 0); }
  double dv() const { return derivative(0, 1, 0); }
  double dt() const { return derivative(0, 0, 1); }
  double duu() const { return derivative(2, 0, 0); }
  double duv() const { return derivative(1, 1, 0); }
  double dvv() const { return derivative(0, 2, 0); }

  /// Partial derivative with respect to one variable, as a polynomial of one
  /// order less.
  Taylor diff(int var) const;

  /// Same polynomial truncated to a lower order.
  Taylor truncated(int order) const;

  Taylor& operator+=(const Taylor& o);
  Taylor& operator-=(const Taylor& o);
  Taylor& operator*=(const Taylor& o);
  Taylor& operator/=(const Taylor& o);

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(Taylor a, const Taylor& b) { return a *= b; }
  friend Taylor operator/(Taylor a, const Taylor& b) { return a /= b; }
  friend Taylor operator-(Taylor a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend Taylor operator+(Taylor a) { return a; }

  /// f(x) for a scalar function whose derivatives f, f', f'', f''' at the
  /// expansion point are supplied.
  Taylor compose(const std::array<double, 4>& derivs) const;

 private:
  std::array<double, kSize> c_{};
  int order_ = kMaxOrder;
};

Taylor sin(const Taylor& x);
Taylor cos(const Taylor& x);
Taylor tan(const Taylor& x);
Taylor sinh(const Taylor& x);
Taylor cosh(const Taylor& x);
Taylor tanh(const Taylor& x);
Taylor exp(const Taylor& x);
Taylor log(const Taylor& x);
Taylor sqrt(const Taylor& x);
Taylor pow(const Taylor& x, double p);
Taylor pow(const Taylor& x, const Taylor& p);
Taylor atan(const Taylor& x);
Taylor atan2(const Taylor& y, const Taylor& x);
Taylor asin(const Taylor& x);
Taylor acos(const Taylor& x);
Taylor asinh(const Taylor& x);
Taylor acosh(const Taylor& x);

inline double value_of(double x) { return x; }
inline double value_of(const Taylor& x) { return x.value(); }

}  // namespace schlafli
