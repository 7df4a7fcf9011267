#pragma once

#include <vector>

#include "bcc/common.hpp"

namespace bcc {

// Normalized mutual information with arithmetic-mean normalization:
// I(A;B) / ((H(A)+H(B))/2). Label values are arbitrary integers.
// Defined as 1.0 when both labelings are constant.
double nmi(const std::vector<cluster_id>& a, const std::vector<cluster_id>& b);

}  // namespace bcc
