#pragma once

// Infinite per-class buffers under static non-preemptive priority: exact
// FCFS PAoI, the priority order minimising its class average, and LCFS upper
// bounds built on the initial-buffer construction.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "paoi/system.hpp"

namespace paoi::infinite {

/// Classes above the pivot merged into "a", the pivot and everything below
/// merged into "b". Class a is empty for the top class.
struct MergedClassView {
    std::size_t pivot = 0;
    double rate_a = 0.0;
    double rate_b = 0.0;
    double util_a = 0.0;
    double util_b = 0.0;
    std::optional<MixtureDistribution> service_a;
    MixtureDistribution service_b;
    double mean_a = 0.0;
    double mean_b = 0.0;
};

MergedClassView merged_view(const SystemSpec& spec, std::size_t pivot);

/// Busy periods V_a (started by a class-a packet) and V_b (started by the
/// pivot or a lower class), both ending once no class-a work is left.
struct BusyPeriodStats {
    double mean_va = 0.0;
    double mean_vb = 0.0;
    double rate_hat_a = 0.0;  // rate at which V_a periods begin
    double frac_in_va = 0.0;
    double frac_in_vb = 0.0;
};

BusyPeriodStats busy_period_stats(const SystemSpec& spec, std::size_t pivot);

/// LSTs of V_a and V_b at s, from the fixed point
/// V_a(s) = psi_a(s + lambda_a - lambda_a V_a(s)). For the top class V_a is
/// empty (returned as 1) and V_b is a single service.
std::pair<double, double> busy_period_lst(const MergedClassView& view, double s);

/// Exact FCFS PAoI per class. The waiting term sits in `buffer_busy`; the gap
/// term is zero. Throws StabilityError if sum(rho) >= 1.
std::vector<PAoIComponents> fcfs_paoi(const SystemSpec& spec);

/// Class average of fcfs_paoi.
double fcfs_average_paoi(const SystemSpec& spec);

/// Class indices sorted by ascending rho (stable, so ties keep input order).
/// Element p is the class that should get priority p.
std::vector<std::size_t> optimal_priority_order(const SystemSpec& spec);

/// Stationary probability that each class's LCFS initial buffer is full.
std::vector<double> lcfs_initial_buffer_probs(const SystemSpec& spec);

/// Jensen upper bound on LCFS PAoI per class from the initial-buffer
/// probabilities.
std::vector<PAoIComponents> lcfs_paoi_upper_bound(const SystemSpec& spec);

}  // namespace paoi::infinite
