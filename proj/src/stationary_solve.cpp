#include "stationary_solve.hpp"

#include <Eigen/SparseLU>
#include <sstream>
#include <vector>

#include "paoi/errors.hpp"

namespace paoi::detail {

LeftNullSolution solve_left_null(const SparseRow& generator, double tolerance) {
    const Eigen::Index n = generator.rows();
    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(generator.nonZeros() + n));
    // Row r of G becomes column r of the system matrix; equation n-1 is
    // replaced by sum(pi) = 1.
    for (Eigen::Index r = 0; r < n; ++r) {
        for (SparseRow::InnerIterator it(generator, r); it; ++it) {
            if (it.col() != n - 1) triplets.emplace_back(it.col(), r, it.value());
        }
        triplets.emplace_back(n - 1, r, 1.0);
    }
    Eigen::SparseMatrix<double> system(n, n);
    system.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "stationary solve: LU factorisation failed (" << lu.lastErrorMessage() << ")";
        throw NumericalError(msg.str());
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd pi = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !pi.allFinite()) {
        std::ostringstream msg;
        msg << "stationary solve: singular system (log|det| = " << lu.logAbsDeterminant() << ")";
        throw NumericalError(msg.str());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (pi(i) < 0.0) {
            if (pi(i) < -1e-12) throw NumericalError("stationary solve: negative probability");
            pi(i) = 0.0;
        }
    }

    // Residual of the generator rescaled to unit largest entry, so the
    // tolerance does not depend on the time unit.
    const double scale = generator.coeffs().cwiseAbs().maxCoeff();
    const Eigen::VectorXd balance = generator.transpose() * pi;
    const double residual = balance.cwiseAbs().maxCoeff() / scale;
    if (residual > tolerance) {
        std::ostringstream msg;
        msg << "stationary solve: residual " << residual << " exceeds " << tolerance
            << " (log|det| = " << lu.logAbsDeterminant() << ")";
        throw NumericalError(msg.str());
    }
    return {std::move(pi), residual};
}

}  // namespace paoi::detail
