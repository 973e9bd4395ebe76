#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polycore/polynomial.hpp"

namespace gainscope::sos {

class SosError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decision variable registry. A variable is either a free scalar or the
// (i, j) entry (i <= j) of a PSD Gram block.
struct VarInfo {
  std::string owner;
  bool gram = false;
  int index = 0;  // free index, or block index for Gram entries
  int i = 0, j = 0;
};

class VarTable {
 public:
  int add(VarInfo v) {
    vars_.push_back(std::move(v));
    return static_cast<int>(vars_.size()) - 1;
  }
  const VarInfo& operator[](int id) const { return vars_.at(id); }
  std::size_t size() const { return vars_.size(); }

 private:
  std::vector<VarInfo> vars_;
};

// c + sum_k a_k v_k over decision variables v_k.
class AffineExpr {
 public:
  AffineExpr(double c = 0.0) : c_(c) {}  // NOLINT(google-explicit-constructor)
  static AffineExpr var(int id, const VarTable* table, double coef = 1.0);

  double constant() const { return c_; }
  const std::vector<std::pair<int, double>>& linear() const { return lin_; }
  bool is_constant() const { return lin_.empty(); }
  const VarTable* table() const { return table_; }

  double eval(std::span<const double> values) const;
  // Largest magnitude among the constant and linear coefficients.
  double magnitude() const;
  AffineExpr pruned(double tol) const;

  friend AffineExpr operator+(const AffineExpr& a, const AffineExpr& b);
  friend AffineExpr operator-(const AffineExpr& a, const AffineExpr& b) { return a + b * -1.0; }
  friend AffineExpr operator*(const AffineExpr& a, double s);
  friend AffineExpr operator*(double s, const AffineExpr& a) { return a * s; }
  // Throws SosError naming both owners when neither factor is constant.
  friend AffineExpr operator*(const AffineExpr& a, const AffineExpr& b);
  friend bool operator==(const AffineExpr& a, const AffineExpr& b) { return a.c_ == b.c_ && a.lin_ == b.lin_; }

 private:
  double c_ = 0.0;
  std::vector<std::pair<int, double>> lin_;  // sorted by id, no zeros
  const VarTable* table_ = nullptr;
};

inline bool coeff_is_zero(const AffineExpr& a) { return a.constant() == 0.0 && a.is_constant(); }

using AffinePoly = poly::BasicPolynomial<AffineExpr>;

AffinePoly lift(const poly::Polynomial& p);
poly::Polynomial evaluate(const AffinePoly& p, std::span<const double> values);
// Constant parts only; fails if any coefficient still depends on a decision.
poly::Polynomial as_constant(const AffinePoly& p);

}  // namespace gainscope::sos
