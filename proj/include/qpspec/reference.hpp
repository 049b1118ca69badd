#pragma once

#include "qpspec/numerics.hpp"

namespace qpspec::reference {

// Slow, independent eigensolver used to cross-check the production
// Householder+QL path: cyclic Jacobi with complex rotations. O(n^3) per
// sweep, quadratically convergent; intended for test and benchmark sizes.
numerics::SpectrumSample hermitian_eigenvalues_jacobi(numerics::HermitianMatrix a,
                                                      int max_sweeps = 60,
                                                      double tol = 1e-13);

}  // namespace qpspec::reference
