#include "pseudocurve/sym.hpp"

#include <nlohmann/json.hpp>

#include "pseudocurve/errors.hpp"

namespace pseudocurve::sym {

enum class Op { Const, Var, Add, Sub, Mul, Conj, Inv };

struct Expr::Node {
  Op op = Op::Const;
  Complex value{0, 0};
  int var = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_const(Complex v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

bool node_is_const(const NodePtr& n, Complex v) {
  return n->op == Op::Const && n->value == v;
}

bool node_is_zero(const NodePtr& n) { return node_is_const(n, Complex(0, 0)); }

NodePtr make(Op op, NodePtr a, NodePtr b = nullptr) {
  // Light constant folding keeps derivative trees small.
  switch (op) {
    case Op::Add:
      if (node_is_zero(a)) return b;
      if (node_is_zero(b)) return a;
      if (a->op == Op::Const && b->op == Op::Const)
        return make_const(a->value + b->value);
      break;
    case Op::Sub:
      if (node_is_zero(b)) return a;
      if (a->op == Op::Const && b->op == Op::Const)
        return make_const(a->value - b->value);
      break;
    case Op::Mul:
      if (node_is_zero(a) || node_is_zero(b)) return make_const(Complex(0, 0));
      if (node_is_const(a, Complex(1, 0))) return b;
      if (node_is_const(b, Complex(1, 0))) return a;
      if (a->op == Op::Const && b->op == Op::Const)
        return make_const(a->value * b->value);
      break;
    case Op::Conj:
      if (a->op == Op::Const) return make_const(std::conj(a->value));
      break;
    case Op::Inv:
      if (a->op == Op::Const) {
        if (a->value == Complex(0, 0))
          throw DomainError("Expr: reciprocal of the zero constant");
        return make_const(Complex(1, 0) / a->value);
      }
      break;
    default:
      break;
  }
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

}  // namespace

Expr::Expr() : node_(make_const(Complex(0, 0))) {}

Expr Expr::constant(Complex v) { return Expr(make_const(v)); }

Expr Expr::variable(int index) {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  n->var = index;
  return Expr(n);
}

Expr operator+(const Expr& a, const Expr& b) {
  return Expr(make(Op::Add, a.node(), b.node()));
}
Expr operator-(const Expr& a, const Expr& b) {
  return Expr(make(Op::Sub, a.node(), b.node()));
}
Expr operator*(const Expr& a, const Expr& b) {
  return Expr(make(Op::Mul, a.node(), b.node()));
}
Expr Expr::operator-() const {
  return Expr::constant(Complex(-1, 0)) * (*this);
}
Expr Expr::conjugate() const { return Expr(make(Op::Conj, node_)); }
Expr Expr::reciprocal() const { return Expr(make(Op::Inv, node_)); }

Expr Expr::wirtinger(int slot) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const:
      return Expr::constant(Complex(0, 0));
    case Op::Var:
      return Expr::constant(slot == 2 * n.var ? Complex(1, 0) : Complex(0, 0));
    case Op::Add:
      return Expr(n.a).wirtinger(slot) + Expr(n.b).wirtinger(slot);
    case Op::Sub:
      return Expr(n.a).wirtinger(slot) - Expr(n.b).wirtinger(slot);
    case Op::Mul:
      return Expr(n.a).wirtinger(slot) * Expr(n.b) +
             Expr(n.a) * Expr(n.b).wirtinger(slot);
    case Op::Conj:
      // d/dx conj(f) = conj(d/d(conj x) f); conjugate slots pair up by xor.
      return Expr(n.a).wirtinger(slot ^ 1).conjugate();
    case Op::Inv: {
      const Expr inner(n.a);
      return -(inner.wirtinger(slot) * inner.reciprocal() * inner.reciprocal());
    }
  }
  return Expr();
}

Complex Expr::eval(Complex z, Complex w, Complex p) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Var:
      return n.var == 0 ? z : (n.var == 1 ? w : p);
    case Op::Add:
      return Expr(n.a).eval(z, w, p) + Expr(n.b).eval(z, w, p);
    case Op::Sub:
      return Expr(n.a).eval(z, w, p) - Expr(n.b).eval(z, w, p);
    case Op::Mul:
      return Expr(n.a).eval(z, w, p) * Expr(n.b).eval(z, w, p);
    case Op::Conj:
      return std::conj(Expr(n.a).eval(z, w, p));
    case Op::Inv: {
      const Complex v = Expr(n.a).eval(z, w, p);
      if (std::abs(v) < 1e-300)
        throw DomainError("Expr: reciprocal of zero during evaluation");
      return Complex(1, 0) / v;
    }
  }
  return Complex(0, 0);
}

bool Expr::is_zero() const { return node_is_zero(node_); }

namespace {

nlohmann::json to_json_impl(const NodePtr& n) {
  switch (n->op) {
    case Op::Const:
      return {{"const", {n->value.real(), n->value.imag()}}};
    case Op::Var: {
      static const char* names[3] = {"z", "w", "p"};
      return {{"var", names[n->var]}};
    }
    case Op::Add:
      return {{"op", "add"}, {"args", {to_json_impl(n->a), to_json_impl(n->b)}}};
    case Op::Sub:
      return {{"op", "sub"}, {"args", {to_json_impl(n->a), to_json_impl(n->b)}}};
    case Op::Mul:
      return {{"op", "mul"}, {"args", {to_json_impl(n->a), to_json_impl(n->b)}}};
    case Op::Conj:
      return {{"op", "conj"}, {"args", {to_json_impl(n->a)}}};
    case Op::Inv:
      return {{"op", "inv"}, {"args", {to_json_impl(n->a)}}};
  }
  return nullptr;
}

Expr from_json_impl(const nlohmann::json& j) {
  if (j.contains("const")) {
    const auto& v = j.at("const");
    return Expr::constant(Complex(v.at(0).get<double>(), v.at(1).get<double>()));
  }
  if (j.contains("var")) {
    const std::string v = j.at("var").get<std::string>();
    if (v == "z") return Expr::variable(0);
    if (v == "w") return Expr::variable(1);
    if (v == "p") return Expr::variable(2);
    throw DomainError("Expr: unknown variable " + v);
  }
  const std::string op = j.at("op").get<std::string>();
  const auto& args = j.at("args");
  if (op == "add") return from_json_impl(args.at(0)) + from_json_impl(args.at(1));
  if (op == "sub") return from_json_impl(args.at(0)) - from_json_impl(args.at(1));
  if (op == "mul") return from_json_impl(args.at(0)) * from_json_impl(args.at(1));
  if (op == "conj") return from_json_impl(args.at(0)).conjugate();
  if (op == "inv") return from_json_impl(args.at(0)).reciprocal();
  throw DomainError("Expr: unknown operator " + op);
}

}  // namespace

std::string Expr::to_json() const { return to_json_impl(node_).dump(); }

Expr Expr::from_json(const std::string& text) {
  return from_json_impl(nlohmann::json::parse(text));
}

Form1 Form1::conjugate() const {
  Form1 out;
  for (int i = 0; i < 6; ++i) out.c[i ^ 1] = c[i].conjugate();
  return out;
}

std::array<Complex, 6> Form1::eval(Complex z, Complex w, Complex p) const {
  std::array<Complex, 6> out;
  for (int i = 0; i < 6; ++i) out[i] = c[i].eval(z, w, p);
  return out;
}

int Form2::pair_index(int i, int j) {
  // (0,1) (0,2) (0,3) (0,4) (0,5) (1,2) ... (4,5)
  int idx = 0;
  for (int a = 0; a < i; ++a) idx += 5 - a;
  return idx + (j - i - 1);
}

std::array<Complex, 15> Form2::eval(Complex z, Complex w, Complex p) const {
  std::array<Complex, 15> out;
  for (int i = 0; i < 15; ++i) out[i] = c[i].eval(z, w, p);
  return out;
}

Form2 wedge(const Form1& a, const Form1& b) {
  Form2 out;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      out.c[Form2::pair_index(i, j)] = a.c[i] * b.c[j] - a.c[j] * b.c[i];
  return out;
}

Form2 exterior_derivative(const Form1& a) {
  Form2 out;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      const Expr dji = a.c[i].wirtinger(j);  // d(coeff_i)/dx^j on dx^j ^ dx^i
      if (dji.is_zero()) continue;
      if (j < i)
        out.c[Form2::pair_index(j, i)] = out.c[Form2::pair_index(j, i)] + dji;
      else
        out.c[Form2::pair_index(i, j)] = out.c[Form2::pair_index(i, j)] - dji;
    }
  }
  return out;
}

Expr ex_z() { return Expr::variable(0); }
Expr ex_w() { return Expr::variable(1); }
Expr ex_p() { return Expr::variable(2); }
Expr ex_one() { return Expr::constant(Complex(1, 0)); }

namespace {
Form1 basis_form(int i) {
  Form1 f;
  f.c[i] = ex_one();
  return f;
}
}  // namespace

Form1 d_z() { return basis_form(0); }
Form1 d_zbar() { return basis_form(1); }
Form1 d_w() { return basis_form(2); }
Form1 d_wbar() { return basis_form(3); }
Form1 d_p() { return basis_form(4); }
Form1 d_pbar() { return basis_form(5); }

Form1 operator+(const Form1& a, const Form1& b) {
  Form1 out;
  for (int i = 0; i < 6; ++i) out.c[i] = a.c[i] + b.c[i];
  return out;
}
Form1 operator-(const Form1& a, const Form1& b) {
  Form1 out;
  for (int i = 0; i < 6; ++i) out.c[i] = a.c[i] - b.c[i];
  return out;
}
Form1 operator*(const Expr& f, const Form1& a) {
  Form1 out;
  for (int i = 0; i < 6; ++i) out.c[i] = f * a.c[i];
  return out;
}

}  // namespace pseudocurve::sym
