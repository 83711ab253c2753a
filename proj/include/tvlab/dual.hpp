#ifndef TVLAB_DUAL_HPP
#define TVLAB_DUAL_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tvlab {

/// Raised when an expression is evaluated at a singular input
/// (division by zero, log of a non-positive number, sqrt of a negative).
class EvalError : public std::runtime_error {
public:
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

/// Forward-mode dual number over an arbitrary scalar T.
/// Nesting Dual<Dual<double>> yields exact second derivatives.
/// An empty partials vector means "constant" (all partials zero);
/// binary operations broadcast constants against seeded duals.
template <class T>
struct Dual {
  T v{};
  std::vector<T> d;

  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT: implicit by design, constants promote
  Dual(T value, std::vector<T> partials) : v(std::move(value)), d(std::move(partials)) {}

  T partial(std::size_t i) const { return i < d.size() ? d[i] : T{}; }
  std::size_t width() const { return d.size(); }
};

inline double scalar_value(double x) { return x; }
template <class T>
double scalar_value(const Dual<T>& x) { return scalar_value(x.v); }

namespace detail {
template <class T>
std::size_t join_width(const Dual<T>& a, const Dual<T>& b) {
  return a.d.size() > b.d.size() ? a.d.size() : b.d.size();
}
}  // namespace detail

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v + b.v;
  const std::size_t w = detail::join_width(a, b);
  r.d.resize(w);
  for (std::size_t i = 0; i < w; ++i) r.d[i] = a.partial(i) + b.partial(i);
  return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v - b.v;
  const std::size_t w = detail::join_width(a, b);
  r.d.resize(w);
  for (std::size_t i = 0; i < w; ++i) r.d[i] = a.partial(i) - b.partial(i);
  return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  Dual<T> r;
  r.v = -a.v;
  r.d.resize(a.d.size());
  for (std::size_t i = 0; i < a.d.size(); ++i) r.d[i] = -a.d[i];
  return r;
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v * b.v;
  const std::size_t w = detail::join_width(a, b);
  r.d.resize(w);
  for (std::size_t i = 0; i < w; ++i) r.d[i] = a.partial(i) * b.v + a.v * b.partial(i);
  return r;
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  if (scalar_value(b) == 0.0) throw EvalError("division by zero");
  Dual<T> r;
  r.v = a.v / b.v;
  const std::size_t w = detail::join_width(a, b);
  r.d.resize(w);
  const T bb = b.v * b.v;
  for (std::size_t i = 0; i < w; ++i)
    r.d[i] = (a.partial(i) * b.v - a.v * b.partial(i)) / bb;
  return r;
}

template <class T> Dual<T> operator+(const Dual<T>& a, double c) { return a + Dual<T>(c); }
template <class T> Dual<T> operator+(double c, const Dual<T>& a) { return Dual<T>(c) + a; }
template <class T> Dual<T> operator-(const Dual<T>& a, double c) { return a - Dual<T>(c); }
template <class T> Dual<T> operator-(double c, const Dual<T>& a) { return Dual<T>(c) - a; }
template <class T> Dual<T> operator*(const Dual<T>& a, double c) { return a * Dual<T>(c); }
template <class T> Dual<T> operator*(double c, const Dual<T>& a) { return Dual<T>(c) * a; }
template <class T> Dual<T> operator/(const Dual<T>& a, double c) { return a / Dual<T>(c); }
template <class T> Dual<T> operator/(double c, const Dual<T>& a) { return Dual<T>(c) / a; }

// Unary chain rule helper: r = u(f.v), r.d = du * f.d with du in T arithmetic.
template <class T, class FV, class FD>
Dual<T> dual_chain(const Dual<T>& f, FV&& value_fn, FD&& deriv_fn) {
  Dual<T> r;
  r.v = value_fn(f.v);
  const T du = deriv_fn(f.v);
  r.d.resize(f.d.size());
  for (std::size_t i = 0; i < f.d.size(); ++i) r.d[i] = du * f.d[i];
  return r;
}

// Double overloads with the same domain checks as the Dual versions, so the
// plain evaluation path reports singular inputs instead of returning NaN.
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double exp(double x) { return std::exp(x); }
inline double abs(double x) { return std::fabs(x); }
inline double log(double x) {
  if (x <= 0.0) throw EvalError("log of non-positive value");
  return std::log(x);
}
inline double sqrt(double x) {
  if (x < 0.0) throw EvalError("sqrt of negative value");
  return std::sqrt(x);
}

inline double checked_div(double a, double b) {
  if (b == 0.0) throw EvalError("division by zero");
  return a / b;
}
template <class T>
Dual<T> checked_div(const Dual<T>& a, const Dual<T>& b) {
  return a / b;
}

template <class T>
Dual<T> sin(const Dual<T>& f) {
  return dual_chain(f, [](const T& x) { return sin(x); }, [](const T& x) { return cos(x); });
}

template <class T>
Dual<T> cos(const Dual<T>& f) {
  return dual_chain(f, [](const T& x) { return cos(x); },
                    [](const T& x) { return -sin(x); });
}

template <class T>
Dual<T> exp(const Dual<T>& f) {
  return dual_chain(f, [](const T& x) { return exp(x); }, [](const T& x) { return exp(x); });
}

template <class T>
Dual<T> log(const Dual<T>& f) {
  if (scalar_value(f) <= 0.0) throw EvalError("log of non-positive value");
  return dual_chain(f, [](const T& x) { return log(x); },
                    [](const T& x) { return T(1.0) / x; });
}

template <class T>
Dual<T> sqrt(const Dual<T>& f) {
  if (scalar_value(f) < 0.0) throw EvalError("sqrt of negative value");
  if (scalar_value(f) == 0.0) throw EvalError("sqrt derivative singular at zero");
  return dual_chain(f, [](const T& x) { return sqrt(x); },
                    [](const T& x) { return T(0.5) / sqrt(x); });
}

template <class T>
Dual<T> abs(const Dual<T>& f) {
  const double s = scalar_value(f);
  if (s == 0.0) throw EvalError("abs not differentiable at zero");
  const double sign = s > 0.0 ? 1.0 : -1.0;
  return dual_chain(f, [sign](const T& x) { return sign > 0 ? x : -x; },
                    [sign](const T&) { return T(sign); });
}

inline double pow_int(double x, int n) {
  if (n < 0) {
    if (x == 0.0) throw EvalError("zero raised to a negative power");
    return 1.0 / pow_int(x, -n);
  }
  double r = 1.0;
  double base = x;
  for (int k = n; k > 0; k >>= 1) {
    if (k & 1) r *= base;
    base *= base;
  }
  return r;
}

template <class T>
Dual<T> pow_int(const Dual<T>& f, int n) {
  if (n == 0) return Dual<T>(1.0);
  if (n < 0) return Dual<T>(1.0) / pow_int(f, -n);
  Dual<T> r;
  r.v = pow_int(f.v, n);
  const T du = double(n) * pow_int(f.v, n - 1);
  r.d.resize(f.d.size());
  for (std::size_t i = 0; i < f.d.size(); ++i) r.d[i] = du * f.d[i];
  return r;
}

}  // namespace tvlab

#endif
