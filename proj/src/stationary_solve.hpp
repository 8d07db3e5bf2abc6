#pragma once

#include <Eigen/Sparse>

namespace paoi::detail {

using SparseRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LeftNullSolution {
    Eigen::VectorXd probs;
    double residual;  // max |(pi G)_j| / max |G_ij|
};

/// Solves pi G = 0, pi 1 = 1 for a generator-like G (rows summing to zero)
/// by replacing the last balance equation with the normalisation and running
/// a sparse LU. Throws NumericalError when the factorisation fails or the
/// residual exceeds `tolerance`.
LeftNullSolution solve_left_null(const SparseRow& generator, double tolerance);

}  // namespace paoi::detail
