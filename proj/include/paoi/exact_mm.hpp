#pragma once

// Exact PAoI for the M/M/1/1+sum(1*) system: every class has a one-slot
// buffer whose waiting packet is overwritten by a new arrival, and the server
// picks the highest-priority occupied buffer without preemption.
//
// Class indices are zero-based throughout: index 0 is the highest priority.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "paoi/system.hpp"

namespace paoi::exact_mm {

inline constexpr std::size_t kMaxClasses = 12;

/// (J, B_1..B_k): `serving` is 0 when idle, otherwise the 1-based class in
/// service; bit i of `occupied` is buffer i+1.
struct BufferState {
    int serving = 0;
    std::uint32_t occupied = 0;

    bool full(std::size_t cls) const { return (occupied >> cls) & 1U; }
    bool operator==(const BufferState&) const = default;
};

/// Idle state first, then (J, B_1..B_k) in lexicographic order with B_1 the
/// most significant bit. Throws ParameterError for k = 0 or k > 12.
std::vector<BufferState> enumerate_states(std::size_t k);

/// Position of `state` in enumerate_states(k).
std::size_t state_index(const BufferState& state, std::size_t k);

using RateMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// CTMC generator over enumerate_states(spec.size()). Arrivals to a full
/// buffer leave the state unchanged and do not appear. Throws
/// UnsupportedModelError unless every class has exponential service.
RateMatrix build_rate_matrix(const SystemSpec& spec);

struct StationaryDistribution {
    std::vector<BufferState> states;
    Eigen::VectorXd probs;
    double residual = 0.0;

    std::size_t classes() const;
    double operator[](const BufferState& s) const;
};

/// Solves pi Q = 0, pi 1 = 1. Throws NumericalError if the solve is singular
/// or the scaled residual exceeds 1e-9.
StationaryDistribution stationary(const RateMatrix& q);

/// p_i: stationary probability that buffer `cls` holds a packet.
double buffer_full_prob(const SystemSpec& spec, const StationaryDistribution& pi, std::size_t cls);

/// E[W_i] = p_i / (lambda_i (1 - p_i)), by Little's law on entering packets.
double expected_buffer_busy(const SystemSpec& spec, double p, std::size_t cls);

/// LST of the class-1 busy period T_1 (one-slot buffer refills during each
/// service): psi(s+lambda) / (1 - psi(s) + psi(s+lambda)).
double eta1(const ServiceDistribution& service, double lambda, double s);

/// LSTs (eta_{12,0}, eta_{12,1}) of the busy period over two identical
/// top classes, starting with the other buffer empty resp. full.
std::pair<double, double> eta12(const ServiceDistribution& service, double lambda, double s);

/// E[exp(-s W_i)] for the buffer-busy time seen by a packet entering buffer
/// `cls` (0, 1 or 2). Class index 2 requires lambda_1 = lambda_2 and
/// mu_1 = mu_2; anything else is UnsupportedModelError.
double w_lst(const SystemSpec& spec, const StationaryDistribution& pi, std::size_t cls, double s);

/// Full decomposition E[A] = 1/mu + E[W] + 1/lambda + (1 - w_lst(lambda))/lambda.
PAoIComponents paoi_exact(const SystemSpec& spec, std::size_t cls);
PAoIComponents paoi_exact(const SystemSpec& spec, const StationaryDistribution& pi, std::size_t cls);

/// Whether paoi_exact supports class `cls` of `spec` (no throw).
bool exact_supported(const SystemSpec& spec, std::size_t cls);

}  // namespace paoi::exact_mm
