#pragma once

#include <array>
#include <complex>
#include <memory>
#include <string>

namespace pseudocurve::sym {

using Complex = std::complex<double>;

// Immutable expression in the three complex coordinates (z, w, p) and their
// conjugates: constants, variables, +, -, *, conj, reciprocal. Wirtinger
// derivatives are exact.
class Expr {
 public:
  Expr();  // zero
  static Expr constant(Complex v);
  static Expr variable(int index);  // 0 = z, 1 = w, 2 = p

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  Expr operator-() const;
  Expr conjugate() const;
  Expr reciprocal() const;

  // Derivative with respect to slot 0..5 = (z, zbar, w, wbar, p, pbar).
  Expr wirtinger(int slot) const;

  Complex eval(Complex z, Complex w, Complex p) const;
  bool is_zero() const;

  std::string to_json() const;
  static Expr from_json(const std::string& text);

  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  const std::shared_ptr<const Node>& node() const { return node_; }

 private:
  std::shared_ptr<const Node> node_;
};

// Complex-valued 1-form: coefficients on (dz, dzbar, dw, dwbar, dp, dpbar).
struct Form1 {
  std::array<Expr, 6> c;

  Form1 conjugate() const;  // coefficients swap with their conjugate slots
  std::array<Complex, 6> eval(Complex z, Complex w, Complex p) const;
};

// Complex-valued 2-form: 15 coefficients on dx^i ^ dx^j, i < j, in the same
// coordinate order.
struct Form2 {
  std::array<Expr, 15> c;

  static int pair_index(int i, int j);  // requires i < j
  std::array<Complex, 15> eval(Complex z, Complex w, Complex p) const;
};

Form2 wedge(const Form1& a, const Form1& b);
Form2 exterior_derivative(const Form1& a);

// Convenience builders.
Expr ex_z();
Expr ex_w();
Expr ex_p();
Expr ex_one();
Form1 d_z();
Form1 d_zbar();
Form1 d_w();
Form1 d_wbar();
Form1 d_p();
Form1 d_pbar();
Form1 operator+(const Form1& a, const Form1& b);
Form1 operator-(const Form1& a, const Form1& b);
Form1 operator*(const Expr& f, const Form1& a);

}  // namespace pseudocurve::sym
