#include "uwmmse/grad.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace uwmmse::grad {

namespace {

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": operand shapes " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + " differ");
  }
}

double sigmoid_of(double x) {
  // Split form keeps exp() from overflowing for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void add_into(Mat& slot, const Mat& delta) {
  if (slot.size() == 0) {
    slot = delta;
  } else {
    slot += delta;
  }
}

}  // namespace

const Mat& Var::value() const {
  if (tape_ == nullptr) throw InvalidArgument("use of an unbound grad::Var");
  return tape_->value(id_);
}

double Var::scalar() const {
  const Mat& v = value();
  if (v.size() != 1) throw ShapeError("Var::scalar on a non-scalar node");
  return v(0, 0);
}

void accumulate(GradientMap& lhs, const GradientMap& rhs) {
  for (const auto& [id, g] : rhs) add_into(lhs[id], g);
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::check_owner(Var v) const {
  if (v.tape() != this || v.id() < 0 || static_cast<std::size_t>(v.id()) >= nodes_.size()) {
    throw InvalidArgument("grad::Var does not belong to this tape");
  }
}

const Tape::Node& Tape::node(Var v) const {
  check_owner(v);
  return nodes_[static_cast<std::size_t>(v.id())];
}

Var Tape::constant(Mat value) {
  Node n;
  n.op = Op::Constant;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::constant(double value) { return constant(Mat::Constant(1, 1, value)); }

Var Tape::parameter(int param_id, Mat value) {
  Node n;
  n.op = Op::Parameter;
  n.param_id = param_id;
  n.needs_grad = true;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const Node& x = node(a);
  const Node& y = node(b);
  require_same_shape(x.value, y.value, "add");
  Node n{Op::Add, a.id(), b.id(), -1, 0.0, 0.0, x.needs_grad || y.needs_grad, x.value + y.value};
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const Node& x = node(a);
  const Node& y = node(b);
  require_same_shape(x.value, y.value, "sub");
  Node n{Op::Sub, a.id(), b.id(), -1, 0.0, 0.0, x.needs_grad || y.needs_grad, x.value - y.value};
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const Node& x = node(a);
  const Node& y = node(b);
  require_same_shape(x.value, y.value, "mul");
  Node n{Op::Mul, a.id(), b.id(), -1, 0.0, 0.0, x.needs_grad || y.needs_grad,
         x.value.cwiseProduct(y.value)};
  return push(std::move(n));
}

Var Tape::div(Var a, Var b) {
  const Node& x = node(a);
  const Node& y = node(b);
  require_same_shape(x.value, y.value, "div");
  Mat out = x.value.array() / y.value.array().max(kDivisionGuard);
  Node n{Op::Div, a.id(), b.id(), -1, 0.0, 0.0, x.needs_grad || y.needs_grad, std::move(out)};
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
  const Node& x = node(a);
  const Node& y = node(b);
  if (x.value.cols() != y.value.rows()) throw ShapeError("matmul: inner dimensions differ");
  Mat out;
  out.noalias() = x.value * y.value;
  Node n{Op::MatMul, a.id(), b.id(), -1, 0.0, 0.0, x.needs_grad || y.needs_grad, std::move(out)};
  return push(std::move(n));
}

Var Tape::rowsum(Var a) {
  const Node& x = node(a);
  Node n{Op::RowSum, a.id(), -1, -1, 0.0, 0.0, x.needs_grad, x.value.rowwise().sum()};
  return push(std::move(n));
}

Var Tape::square(Var a) {
  const Node& x = node(a);
  Node n{Op::Square, a.id(), -1, -1, 0.0, 0.0, x.needs_grad, x.value.cwiseProduct(x.value)};
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  const Node& x = node(a);
  Node n{Op::Relu, a.id(), -1, -1, 0.0, 0.0, x.needs_grad, x.value.cwiseMax(0.0)};
  return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
  const Node& x = node(a);
  Node n{Op::Sigmoid, a.id(), -1, -1, 0.0, 0.0, x.needs_grad, x.value.unaryExpr(&sigmoid_of)};
  return push(std::move(n));
}

Var Tape::saturate(Var a, double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("saturate: lo must be < hi");
  const Node& x = node(a);
  Node n{Op::Saturate, a.id(), -1, -1, lo, hi, x.needs_grad, x.value.cwiseMax(lo).cwiseMin(hi)};
  return push(std::move(n));
}

Var Tape::log(Var a) {
  const Node& x = node(a);
  if ((x.value.array() <= 0.0).any()) throw DomainError("log of a nonpositive value");
  Node n{Op::Log, a.id(), -1, -1, 0.0, 0.0, x.needs_grad, x.value.array().log().matrix()};
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  const Node& x = node(a);
  Node n{Op::Sum, a.id(), -1, -1, 0.0, 0.0, x.needs_grad, Mat::Constant(1, 1, x.value.sum())};
  return push(std::move(n));
}

Var Tape::dot(Var a, Var b) {
  const Node& x = node(a);
  const Node& y = node(b);
  require_same_shape(x.value, y.value, "dot");
  Node n{Op::Dot, a.id(), b.id(), -1, 0.0, 0.0, x.needs_grad || y.needs_grad,
         Mat::Constant(1, 1, x.value.cwiseProduct(y.value).sum())};
  return push(std::move(n));
}

Var Tape::broadcast(Var a, Eigen::Index rows, Eigen::Index cols) {
  const Node& x = node(a);
  if (x.value.size() != 1) throw ShapeError("broadcast expects a 1x1 operand");
  Node n{Op::Broadcast, a.id(), -1, -1, 0.0, 0.0, x.needs_grad, Mat::Constant(rows, cols, x.value(0, 0))};
  return push(std::move(n));
}

Var Tape::scale(Var a, double factor) {
  const Node& x = node(a);
  Node n{Op::Scale, a.id(), -1, -1, factor, 0.0, x.needs_grad, factor * x.value};
  return push(std::move(n));
}

GradientMap Tape::backward(Var loss) const {
  const Node& root = node(loss);
  if (root.value.size() != 1) throw ShapeError("backward requires a scalar loss");

  GradientMap out;
  if (!root.needs_grad) return out;

  std::vector<Mat> adj(nodes_.size());
  adj[static_cast<std::size_t>(loss.id())] = Mat::Ones(1, 1);

  for (int id = loss.id(); id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    Mat& g = adj[static_cast<std::size_t>(id)];
    if (!n.needs_grad || g.size() == 0) continue;

    const Node* x = n.lhs >= 0 ? &nodes_[static_cast<std::size_t>(n.lhs)] : nullptr;
    const Node* y = n.rhs >= 0 ? &nodes_[static_cast<std::size_t>(n.rhs)] : nullptr;
    const bool gx = x != nullptr && x->needs_grad;
    const bool gy = y != nullptr && y->needs_grad;
    auto& ax = gx ? adj[static_cast<std::size_t>(n.lhs)] : g;
    auto& ay = gy ? adj[static_cast<std::size_t>(n.rhs)] : g;

    switch (n.op) {
      case Op::Constant:
        break;
      case Op::Parameter:
        add_into(out[n.param_id], g);
        break;
      case Op::Add:
        if (gx) add_into(ax, g);
        if (gy) add_into(ay, g);
        break;
      case Op::Sub:
        if (gx) add_into(ax, g);
        if (gy) add_into(ay, -g);
        break;
      case Op::Mul:
        if (gx) add_into(ax, g.cwiseProduct(y->value));
        if (gy) add_into(ay, g.cwiseProduct(x->value));
        break;
      case Op::Div: {
        const auto den = y->value.array().max(kDivisionGuard);
        if (gx) add_into(ax, (g.array() / den).matrix());
        if (gy) {
          const auto active = (y->value.array() > kDivisionGuard).cast<double>();
          add_into(ay, (-g.array() * x->value.array() / (den * den) * active).matrix());
        }
        break;
      }
      case Op::MatMul:
        if (gx) add_into(ax, g * y->value.transpose());
        if (gy) add_into(ay, x->value.transpose() * g);
        break;
      case Op::RowSum:
        if (gx) add_into(ax, g.replicate(1, x->value.cols()));
        break;
      case Op::Square:
        if (gx) add_into(ax, 2.0 * g.cwiseProduct(x->value));
        break;
      case Op::Relu:
        if (gx) add_into(ax, (g.array() * (x->value.array() > 0.0).cast<double>()).matrix());
        break;
      case Op::Sigmoid:
        if (gx) add_into(ax, (g.array() * n.value.array() * (1.0 - n.value.array())).matrix());
        break;
      case Op::Saturate:
        if (gx) {
          const auto inside = ((x->value.array() > n.lo) && (x->value.array() < n.hi)).cast<double>();
          add_into(ax, (g.array() * inside).matrix());
        }
        break;
      case Op::Log:
        if (gx) add_into(ax, (g.array() / x->value.array()).matrix());
        break;
      case Op::Sum:
        if (gx) add_into(ax, Mat::Constant(x->value.rows(), x->value.cols(), g(0, 0)));
        break;
      case Op::Dot:
        if (gx) add_into(ax, g(0, 0) * y->value);
        if (gy) add_into(ay, g(0, 0) * x->value);
        break;
      case Op::Broadcast:
        if (gx) add_into(ax, Mat::Constant(1, 1, g.sum()));
        break;
      case Op::Scale:
        if (gx) add_into(ax, n.lo * g);
        break;
    }
  }
  return out;
}

KinkReport Tape::kinks() const {
  KinkReport report;
  for (const Node& n : nodes_) {
    if (n.op != Op::Relu && n.op != Op::Saturate && n.op != Op::Div) continue;
    if (!n.needs_grad) continue;
    const Mat& in = n.op == Op::Div ? nodes_[static_cast<std::size_t>(n.rhs)].value
                                    : nodes_[static_cast<std::size_t>(n.lhs)].value;
    for (Eigen::Index k = 0; k < in.size(); ++k) {
      const double x = in(k);
      if (n.op == Op::Relu) {
        report.min_distance = std::min(report.min_distance, std::abs(x));
        report.signature.push_back(x > 0.0 ? 1 : 0);
      } else if (n.op == Op::Saturate) {
        if (std::isfinite(n.lo)) report.min_distance = std::min(report.min_distance, std::abs(x - n.lo));
        if (std::isfinite(n.hi)) report.min_distance = std::min(report.min_distance, std::abs(x - n.hi));
        report.signature.push_back(x <= n.lo ? -1 : (x >= n.hi ? 1 : 0));
      } else {
        report.signature.push_back(x > kDivisionGuard ? 1 : 0);
      }
    }
  }
  return report;
}

}  // namespace uwmmse::grad
