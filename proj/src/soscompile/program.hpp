#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "polycore/polynomial.hpp"
#include "sdpsolve/sdp.hpp"
#include "soscompile/affine.hpp"
#include "soscompile/certificate.hpp"

namespace gainscope::sos {

enum class Structure { free, sos, quadratic };

struct DecisionPoly {
  std::string name;
  Structure structure = Structure::free;
  std::vector<std::string> vars;
  AffinePoly poly;
  // sos structure only
  int block = -1;
  std::vector<poly::Exponent> basis;
  bool multiplier = false;
};

struct SosConstraint {
  std::string name;
  std::vector<std::string> vars;        // every variable of the constraint
  std::vector<std::string> state_vars;  // subset the expression is quadratic in
  AffinePoly expression;
  std::vector<poly::Polynomial> domain;  // g_j (or products g_i g_j)
  std::vector<int> multipliers;          // decision index per domain entry
  bool state_quadratic = false;
};

struct CompileOptions {
  double drop_tol = 1e-12;
  int max_gram_dim = 200;
};

struct CompiledProgram {
  sdp::SdpProblem sdp;
  std::vector<int> constraint_block;  // -1 when the Gram basis is empty
  std::vector<std::vector<poly::Exponent>> constraint_basis;
};

class SosProgram {
 public:
  SosProgram();
  SosProgram(const SosProgram&) = delete;
  SosProgram& operator=(const SosProgram&) = delete;
  SosProgram(SosProgram&&) = default;
  SosProgram& operator=(SosProgram&&) = default;

  // Free polynomial with every monomial of total degree <= degree in vars.
  const DecisionPoly& declare_free(const std::string& name, const std::vector<std::string>& vars, int degree);
  // z' P(t) z with P symmetric and each entry a free polynomial of degree
  // <= theta_degree in theta_vars.
  const DecisionPoly& declare_quadratic(const std::string& name, const std::vector<std::string>& state_vars,
                                        const std::vector<std::string>& theta_vars, int theta_degree);
  // b' Q b with Q psd over the given monomial basis.
  const DecisionPoly& declare_sos(const std::string& name, const std::vector<std::string>& vars,
                                  const std::vector<poly::Exponent>& basis);

  const DecisionPoly& decision(const std::string& name) const;
  const std::deque<DecisionPoly>& decisions() const { return decisions_; }
  const std::vector<SosConstraint>& constraints() const { return constraints_; }
  const VarTable& table() const { return *table_; }

  // Registers expr - sum_j m_j g_j in Sigma with fresh SOS multipliers m_j of
  // degree multiplier_degree in the non-state variables. When expr is
  // homogeneous quadratic in state_vars, the multipliers are too.
  const SosConstraint& add_sos_constraint(const std::string& name, const AffinePoly& expr,
                                          const std::vector<std::string>& state_vars,
                                          const std::vector<poly::Polynomial>& domain, int multiplier_degree,
                                          bool products = false);
  // decision(point) == value
  void add_point_equality(const std::string& decision, const std::vector<double>& point, double value);
  void set_objective(const AffineExpr& objective) { objective_ = objective; }
  const AffineExpr& objective() const { return objective_; }

  void set_meta(const std::string& key, const std::string& value);
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return meta_; }

  CompiledProgram compile(const CompileOptions& opt = {}) const;

  // Numeric decision values, Gram projection onto the coefficient-matching
  // space, independent re-expansion, PSD check.
  BoundCertificate recover_and_validate(const CompiledProgram& compiled, const sdp::SdpSolution& sol,
                                        const ValidationTolerances& tol = {}) const;

 private:
  const DecisionPoly& push(DecisionPoly d);
  int new_free(const std::string& owner);
  std::vector<double> values(const sdp::SdpSolution& sol) const;

  std::unique_ptr<VarTable> table_;
  std::deque<DecisionPoly> decisions_;  // stable references
  std::vector<SosConstraint> constraints_;
  std::vector<PointEquality> equalities_;
  std::vector<int> declared_blocks_;  // dimensions of decision Gram blocks
  AffineExpr objective_;
  int num_free_ = 0;
  std::vector<std::pair<std::string, std::string>> meta_;
};

// Gram basis {s * t^a : s in state_vars, |a| <= theta_degree} over vars.
std::vector<poly::Exponent> state_quadratic_basis(const std::vector<std::string>& vars,
                                                  const std::vector<std::string>& state_vars, int theta_degree);

// Multiplies expr by d^k after establishing d > 0 on the domain, either by
// interval evaluation over a box domain or by an auxiliary SOS program
// maximizing the margin e in d - e - sum m_j g_j in Sigma. Provenance goes
// into the program metadata. Throws SosError when positivity is not shown.
struct DenominatorEvidence {
  std::string method;  // "constant", "interval" or "sos"
  double lower_bound = 0.0;
};
AffinePoly clear_and_certify_denominator(SosProgram& prog, const AffinePoly& expr, const poly::Polynomial& d, int k,
                                         const std::vector<poly::Polynomial>& domain,
                                         DenominatorEvidence* evidence = nullptr);
DenominatorEvidence certify_positive(const poly::Polynomial& d, const std::vector<poly::Polynomial>& domain);

}  // namespace gainscope::sos
