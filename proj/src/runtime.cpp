#include "byzpg/runtime.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace byzpg {

void ensure_finite(const ParamVector& v, int round, int agent, std::string_view what) {
  if (vec_all_finite(v)) return;
  std::ostringstream msg;
  msg << "non-finite " << what << " at round " << round << ", agent " << agent;
  throw std::runtime_error(msg.str());
}

void ensure_finite_scalar(double x, int round, int agent, std::string_view what) {
  if (std::isfinite(x)) return;
  std::ostringstream msg;
  msg << "non-finite " << what << " at round " << round << ", agent " << agent;
  throw std::runtime_error(msg.str());
}

}  // namespace byzpg
