#pragma once

#include <vector>

#include "pmdp/rational.hpp"

namespace pmdp {

using Vec = std::vector<Rational>;
using Mat = std::vector<Vec>;

// Solves A x = b exactly over the rationals by Gaussian elimination.
// Throws InternalError if the system is singular; callers only build
// systems that are nonsingular by construction (transient-part resolvents,
// stationary distributions with a normalization row).
Vec solve_linear(Mat a, Vec b);

// Same as solve_linear for several right-hand sides at once.
// rhs[i] is row i of the right-hand-side matrix; returns the solution in
// the same layout (solution column j answers rhs column j).
Mat solve_linear_multi(Mat a, Mat rhs);

}  // namespace pmdp
