#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polycore/polynomial.hpp"

namespace gainscope::sos {

struct GramRecord {
  std::string name;
  std::vector<poly::Exponent> basis;  // over the enclosing constraint's variables
  Eigen::MatrixXd Q;
  double min_eig = 0.0;
};

// expression - sum_j multipliers[j] * domain[j] == basis' Q basis
struct ConstraintRecord {
  std::string name;
  std::vector<std::string> vars;
  poly::Polynomial expression;
  std::vector<poly::Polynomial> domain;
  std::vector<GramRecord> multipliers;  // parallel to domain
  GramRecord gram;
  double residual = 0.0;
};

// decision(point) == value
struct PointEquality {
  std::string decision;
  std::vector<double> point;
  double value = 0.0;
  double residual = 0.0;
};

struct BoundCertificate {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::pair<std::string, poly::Polynomial>> decisions;
  std::vector<ConstraintRecord> constraints;
  std::vector<PointEquality> equalities;
  double objective = 0.0;
  double coeff_residual = 0.0;
  double min_eig = 0.0;
  bool valid = false;
  std::string reason;

  const poly::Polynomial* decision(const std::string& name) const;
  std::string meta(const std::string& key, const std::string& fallback = "") const;
  void set_meta(const std::string& key, const std::string& value);
};

struct ValidationTolerances {
  double psd = 1e-7;
  double match = 1e-7;
};

// Recomputes every residual and eigenvalue from the stored data and sets
// valid / reason ("coeff-mismatch", "gram-not-psd", "equality-violated").
void validate(BoundCertificate& cert, const ValidationTolerances& tol = {});

poly::Polynomial gram_polynomial(const GramRecord& g, const std::vector<std::string>& vars);

void write_certificate(std::ostream& os, const BoundCertificate& cert);
BoundCertificate read_certificate(std::istream& is);

}  // namespace gainscope::sos
