#pragma once

#include <string>
#include <vector>

namespace peelkit {

/// Vertex of the Ulam tree: a finite word over positive integers. The root is
/// the empty word.
using UlamLabel = std::vector<int>;

/// "" for the root, "1.2" for the second child of the first child.
std::string label_string(const UlamLabel& u);

}  // namespace peelkit
