#pragma once

// PAoI upper bounds for M/G/1/1+sum(1*) with one service law shared by every
// class. Rejection probabilities come from the departure-epoch embedded
// chains of the nested subsystems S_1 .. S_k (classes 1..l only).

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "paoi/system.hpp"

namespace paoi::bounds_mg {

inline constexpr std::size_t kMaxClasses = 12;

struct DepartureChain {
    std::size_t subsystem_size = 0;
    /// Occupancy patterns (bit i = buffer i+1), ordered lexicographically
    /// with B_1 most significant: for l=2 that is (0,0),(0,1),(1,0),(1,1).
    std::vector<std::uint32_t> states;
    /// Row-stochastic transition matrix between departure epochs.
    Eigen::SparseMatrix<double, Eigen::RowMajor> transition;
};

/// Departure chain of the subsystem made of the first `l` classes. Throws
/// UnsupportedModelError when the classes do not share one service law.
DepartureChain build_departure_chain(const SystemSpec& spec, std::size_t l);

/// Stationary vector of the chain (residual <= 1e-10).
Eigen::VectorXd chain_stationary(const DepartureChain& chain);

/// pi_l(0,...,0): the chain's stationary probability of leaving all buffers
/// empty.
double zero_state_prob(const DepartureChain& chain);

struct RejectionProfile {
    std::vector<double> p;
};

/// Rejection (buffer-full) probability of every class from the chains for
/// l = 1..k.
RejectionProfile rejection_probs(const SystemSpec& spec);

/// The Jensen bound 1/mu + p/(lambda(1-p)) + 2/lambda - exp(-p/(1-p))/lambda
/// per class, returned as its E[P], E[W], E[I], E[G]-bound decomposition.
/// Throws NumericalError when some p_i is 1 to within 1e-12.
std::vector<PAoIComponents> paoi_upper_bound(const SystemSpec& spec, const RejectionProfile& profile);

/// Same bound for a single class with explicit service mean; shared with the
/// LCFS analysis.
PAoIComponents jensen_bound(double mean_service, double arrival_rate, double p);

struct LimitReport {
    std::size_t scaled_class = 0;
    std::vector<double> exponents;        // t values; lambda_i is scaled by 10^t
    std::vector<std::vector<double>> bounds;  // bounds[point][class], +inf when p_j rounds to 1
    std::vector<double> sup;              // max over the grid, per class
    std::vector<double> relative_variation;  // (max - min) / min, per class
    std::vector<bool> strictly_increasing;   // per class
};

/// Evaluates the bound with the arrival rate of class `cls` scaled by 10^t
/// for every t in `exponents`.
LimitReport limit_diagnostics(const SystemSpec& spec, std::size_t cls, const std::vector<double>& exponents);

}  // namespace paoi::bounds_mg
