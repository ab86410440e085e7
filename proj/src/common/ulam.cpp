#include "peelkit/ulam.hpp"

namespace peelkit {

std::string label_string(const UlamLabel& u) {
  std::string s;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(u[i]);
  }
  return s;
}

}  // namespace peelkit
