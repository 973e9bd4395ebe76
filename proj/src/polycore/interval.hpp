#pragma once

#include <optional>
#include <vector>

#include "polycore/polynomial.hpp"

namespace gainscope::poly {

struct Range {
  double lo = 0.0, hi = 0.0;
};

// Recognises a domain written as one concave univariate quadratic per
// variable, e.g. -(t1+1.5)*(t1-1.5) >= 0, and returns the box it describes.
std::optional<std::vector<Range>> box_from_domain(const std::vector<Polynomial>& domain, std::size_t nvars);

// Natural interval extension of p over the box (monomial by monomial).
Range interval_eval(const Polynomial& p, const std::vector<Range>& box);

}  // namespace gainscope::poly
