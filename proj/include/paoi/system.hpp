#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "paoi/dist.hpp"

namespace paoi {

/// One data source. Classes are held in priority order; index 0 is the
/// highest priority (class 1 in the usual numbering).
struct ClassSpec {
    double arrival_rate;
    ServiceDistribution service;
};

class SystemSpec {
public:
    /// Throws ParameterError when empty or a rate is not strictly positive.
    explicit SystemSpec(std::vector<ClassSpec> classes);

    std::size_t size() const { return classes_.size(); }
    const ClassSpec& operator[](std::size_t i) const { return classes_[i]; }
    const std::vector<ClassSpec>& classes() const { return classes_; }

    double arrival_rate(std::size_t i) const { return classes_[i].arrival_rate; }
    double mean_service(std::size_t i) const { return mean(classes_[i].service); }
    /// rho_i = lambda_i * E[P_i].
    double utilization(std::size_t i) const { return arrival_rate(i) * mean_service(i); }
    double total_utilization() const;
    double total_arrival_rate() const;

    bool all_exponential() const;
    /// The common law when every class shares one service distribution.
    std::optional<ServiceDistribution> common_service() const;

    /// Copy with the classes rearranged: result[p] = (*this)[order[p]].
    SystemSpec reordered(const std::vector<std::size_t>& order) const;

private:
    std::vector<ClassSpec> classes_;
};

/// Throws StabilityError naming the first partial utilisation sum that
/// reaches one.
void require_stable(const SystemSpec& spec);

/// The four terms of E[A] = E[P] + E[W] + E[I] + E[G].
struct PAoIComponents {
    double service = 0.0;
    double buffer_busy = 0.0;
    double interarrival = 0.0;
    double gap = 0.0;
    double total = 0.0;

    static PAoIComponents from_parts(double service, double buffer_busy, double interarrival, double gap) {
        return {service, buffer_busy, interarrival, gap, service + buffer_busy + interarrival + gap};
    }
};

enum class ValueKind { Exact, UpperBound, Simulated };

/// Per-class PAoI as produced by one analysis route.
struct PAoIValue {
    ValueKind kind;
    double paoi;
    std::optional<PAoIComponents> components;
    std::optional<double> ci_halfwidth;
};

using PAoIReport = std::vector<PAoIValue>;

}  // namespace paoi
