#pragma once

#include "pqsys/types.hpp"

#include <array>
#include <memory>
#include <string>

namespace pqsys {

/// Arithmetic expression over the symbols x, y, s, t, xi1, xi2, nu1, nu2
/// with functions abs, pow, sin, cos, exp and numeric constants (pi named).
/// Parse errors carry a byte offset into the source text.
class Expression {
public:
  /// Evaluation slots, in the order expected by evaluate().
  enum Slot { X = 0, Y, S, T, XI1, XI2, NU1, NU2, SLOT_COUNT };

  static Expression parse(const std::string& text);

  Real evaluate(const std::array<Real, SLOT_COUNT>& env) const;

  /// Convenience for fields of the spatial variables only.
  Real evaluate_xy(Real x, Real y) const {
    return evaluate({x, y, 0, 0, 0, 0, 0, 0});
  }

  const std::string& source() const { return source_; }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

struct ExpressionError : std::runtime_error {
  ExpressionError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (at offset " + std::to_string(offset) + ")"), offset(offset) {}
  std::size_t offset;
};

}  // namespace pqsys
