#pragma once

#include <span>
#include <string>
#include <vector>

#include "polycore/polynomial.hpp"

namespace gainscope::poly {

// Evaluation threshold below which a denominator is treated as vanishing.
inline constexpr double kSingularDenominator = 1e-12;

class RationalFunction {
 public:
  RationalFunction() : num_(), den_(Polynomial::constant(1.0)) {}
  RationalFunction(Polynomial num);  // NOLINT(google-explicit-constructor)
  RationalFunction(Polynomial num, Polynomial den);

  static RationalFunction constant(double c) { return RationalFunction(Polynomial::constant(c)); }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() <= 0; }
  // Numerator divided through by a constant denominator.
  Polynomial as_polynomial() const;

  std::vector<std::string> vars() const { return merge_vars(num_.vars(), den_.vars()); }
  RationalFunction aligned(const std::vector<std::string>& vars) const;

  // Throws PolyError("parameter singularity ...") when |den| <= kSingularDenominator.
  double eval(std::span<const double> point) const;

  RationalFunction substitute(const std::map<std::string, Polynomial>& subs) const;

  RationalFunction operator-() const { return {-num_, den_}; }
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  friend bool operator==(const RationalFunction& a, const RationalFunction& b);

 private:
  void canonicalize();

  Polynomial num_;
  Polynomial den_;
};

std::string to_string(const RationalFunction& r);

// Returns k such that a == k*b, if the two polynomials are proportional.
bool proportional(const Polynomial& a, const Polynomial& b, double* k);

// Dense row-major matrix of rational functions of the parameters.
struct ParamMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<RationalFunction> entries;

  ParamMatrix() = default;
  ParamMatrix(int r, int c) : rows(r), cols(c), entries(static_cast<std::size_t>(r) * c) {}

  RationalFunction& operator()(int i, int j) { return entries[static_cast<std::size_t>(i) * cols + j]; }
  const RationalFunction& operator()(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * cols + j];
  }
};

struct ClearedMatrix {
  ParamMatrix numerators;  // polynomial entries
  Polynomial denominator;  // common denominator d
};

// Product of the distinct (up to scaling) non-constant denominators.
struct CommonDenominator {
  std::vector<Polynomial> factors;
  Polynomial product = Polynomial::constant(1.0);
};

CommonDenominator common_denominator(std::span<const ParamMatrix* const> ms);

// Polynomial numerators N with entry(i,j) == N(i,j) / d.product exactly. `d`
// must have been produced by common_denominator over a set containing `m`.
ParamMatrix numerators_over(const ParamMatrix& m, const CommonDenominator& d);

// Common denominator and numerators for a single matrix. Throws PolyError
// for a zero denominator polynomial.
ClearedMatrix clear_denominators(const ParamMatrix& m);

}  // namespace gainscope::poly
