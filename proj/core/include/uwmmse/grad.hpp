#pragma once

// Tape-based reverse-mode differentiation over dense arrays.
//
// Scalars are 1x1 arrays and vectors are column arrays. Every node stores its
// forward value; backward() walks the tape in reverse and accumulates adjoints
// additively. Only nodes that depend on a parameter carry adjoints, so
// channel-derived constants never receive gradients.

#include "uwmmse/types.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <vector>

namespace uwmmse::grad {

enum class Op : std::uint8_t {
  Constant,
  Parameter,
  Add,
  Sub,
  Mul,
  Div,
  MatMul,
  RowSum,
  Square,
  Relu,
  Sigmoid,
  Saturate,
  Log,
  Sum,
  Dot,
  Broadcast,
  Scale,
};

class Tape;

/// Handle to a tape node. Cheap to copy; valid while its tape lives.
class Var {
 public:
  Var() = default;

  [[nodiscard]] const Mat& value() const;
  [[nodiscard]] Eigen::Index rows() const { return value().rows(); }
  [[nodiscard]] Eigen::Index cols() const { return value().cols(); }
  [[nodiscard]] double scalar() const;
  [[nodiscard]] Tape* tape() const noexcept { return tape_; }
  [[nodiscard]] int id() const noexcept { return id_; }
  [[nodiscard]] bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Parameter id -> gradient with the parameter's shape.
using GradientMap = std::map<int, Mat>;

/// Adds `rhs` into `lhs` key by key.
void accumulate(GradientMap& lhs, const GradientMap& rhs);

struct KinkReport {
  /// Smallest distance of any relu input to 0 or saturate input to its bounds.
  double min_distance = std::numeric_limits<double>::infinity();
  /// Active-region code of every non-smooth element, in tape order.
  std::vector<std::int8_t> signature;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Mat value);
  Var constant(double value);
  /// Trainable leaf. Several leaves may share one parameter id; their
  /// gradients are summed.
  Var parameter(int param_id, Mat value);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  /// a / max(b, kDivisionGuard), elementwise; the guard applies to backward too.
  Var div(Var a, Var b);
  Var matmul(Var a, Var b);
  Var rowsum(Var a);
  Var square(Var a);
  Var relu(Var a);
  Var sigmoid(Var a);
  /// Clamp to [lo, hi]; derivative 1 strictly inside, 0 elsewhere.
  Var saturate(Var a, double lo, double hi);
  Var log(Var a);
  Var sum(Var a);
  Var dot(Var a, Var b);
  /// Expands a 1x1 node to rows x cols.
  Var broadcast(Var a, Eigen::Index rows, Eigen::Index cols);
  Var scale(Var a, double factor);

  /// Reverse sweep from a 1x1 node.
  [[nodiscard]] GradientMap backward(Var loss) const;

  [[nodiscard]] KinkReport kinks() const;
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] const Mat& value(int id) const { return nodes_.at(static_cast<std::size_t>(id)).value; }

 private:
  struct Node {
    Op op = Op::Constant;
    int lhs = -1;
    int rhs = -1;
    int param_id = -1;
    double lo = 0.0;
    double hi = 0.0;
    bool needs_grad = false;
    Mat value;
  };

  Var push(Node node);
  const Node& node(Var v) const;
  void check_owner(Var v) const;

  std::deque<Node> nodes_;
};

inline Var operator+(Var a, Var b) { return a.tape()->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tape()->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tape()->mul(a, b); }
inline Var operator/(Var a, Var b) { return a.tape()->div(a, b); }
inline Var operator*(double s, Var a) { return a.tape()->scale(a, s); }

inline Var matmul(Var a, Var b) { return a.tape()->matmul(a, b); }
inline Var rowsum(Var a) { return a.tape()->rowsum(a); }
inline Var square(Var a) { return a.tape()->square(a); }
inline Var relu(Var a) { return a.tape()->relu(a); }
inline Var sigmoid(Var a) { return a.tape()->sigmoid(a); }
inline Var saturate(Var a, double lo, double hi) { return a.tape()->saturate(a, lo, hi); }
inline Var log(Var a) { return a.tape()->log(a); }
inline Var sum(Var a) { return a.tape()->sum(a); }
inline Var dot(Var a, Var b) { return a.tape()->dot(a, b); }

// ---------------------------------------------------------------------------
// Finite-difference verification.

/// Builds a scalar node on `tape` from parameter leaves (one per array).
using TapeFunction = std::function<Var(Tape& tape, const std::vector<Var>& params)>;

struct FdOptions {
  double h = 1e-6;
  /// 0 checks every coordinate; otherwise this many random unit directions.
  int directions = 0;
  std::uint64_t seed = 0;
  /// Smallest relative error the check must be able to resolve. A direction
  /// whose central-difference roundoff exceeds resolution * |analytic| makes
  /// the result inconclusive.
  double resolution = 1e-6;
};

struct FdResult {
  /// max |analytic - central difference| / max(|analytic|, 1e-8)
  double max_rel_error = 0.0;
  /// False when an evaluation point lies within 1e3 h of a relu/saturate
  /// kink or a perturbation crossed one, or when roundoff in the central
  /// difference is too large to resolve the error; the error is then not
  /// meaningful.
  bool conclusive = true;
  /// Largest roundoff estimate relative to |analytic| over all directions.
  double max_roundoff = 0.0;
  double min_kink_distance = std::numeric_limits<double>::infinity();
  int checks = 0;
};

FdResult finite_diff_check(const TapeFunction& f, const std::vector<Mat>& theta, const FdOptions& opts = {});

}  // namespace uwmmse::grad
