#include "strata/tolerance.hpp"

#include <cstdlib>
#include <string>

#include "strata/error.hpp"

namespace strata {

void ToleranceConfig::validate() const {
  if (!(rank_rel_tol > 0.0 && rank_rel_tol < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "rank_rel_tol must lie in (0, 1), got " + std::to_string(rank_rel_tol));
  }
  if (!(membership_cond_max > 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "membership_cond_max must exceed 1, got " + std::to_string(membership_cond_max));
  }
}

ToleranceConfig ToleranceConfig::from_environment() {
  ToleranceConfig tol;
  if (const char* raw = std::getenv("STRATA_TOL"); raw != nullptr && *raw != '\0') {
    char* end = nullptr;
    const double value = std::strtod(raw, &end);
    if (end == raw || *end != '\0') {
      throw Error(ErrorKind::InvalidArgument, std::string("STRATA_TOL is not a number: ") + raw);
    }
    tol.rank_rel_tol = value;
    tol.validate();
  }
  return tol;
}

}  // namespace strata
