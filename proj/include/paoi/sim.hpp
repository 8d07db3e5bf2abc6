#pragma once

// Discrete-event simulation of k Poisson sources feeding one non-preemptive
// static-priority server. Used as the oracle for every analytic result.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "paoi/system.hpp"

namespace paoi::sim {

enum class Discipline {
    Buffer1Replace,  // one-slot buffer per class, newest arrival overwrites
    FcfsInfinite,
    LcfsInfinite,  // newest waiting packet first, no preemption
};

std::string_view to_string(Discipline d);
std::optional<Discipline> parse_discipline(std::string_view name);

struct SimConfig {
    std::uint64_t seed = 1;
    std::size_t replications = 10;
    /// Recorded peaks per class before a replication stops.
    std::size_t completions_per_replication = 100000;
    /// Completions per class discarded before statistics start.
    std::size_t warmup_completions = 1000;
    double confidence_level = 0.99;
    /// A class queue longer than this aborts the run as unstable.
    std::size_t max_queue_length = 1000000;
    /// Worker threads for replications; 0 picks hardware concurrency.
    unsigned threads = 0;

    /// Throws ParameterError when an invariant is violated.
    void validate() const;
};

struct ClassEstimate {
    double paoi_mean = 0.0;
    double ci_halfwidth = 0.0;
    /// Time-average occupancy of the class buffer (initial buffer for LCFS,
    /// non-empty queue for FCFS).
    double buffer_full_fraction = 0.0;
    double occupancy_halfwidth = 0.0;
    double wait_mean = 0.0;
    double wait_halfwidth = 0.0;
    std::uint64_t completions = 0;
    std::uint64_t peaks = 0;
    std::uint64_t drops = 0;
};

struct SimEstimate {
    Discipline discipline = Discipline::Buffer1Replace;
    double confidence_level = 0.99;
    std::size_t replications = 0;
    std::vector<ClassEstimate> classes;
};

/// Statistics of one replication, before aggregation.
struct ReplicationResult {
    struct PerClass {
        double paoi_mean = 0.0;
        double occupancy = 0.0;
        double wait_mean = 0.0;
        std::uint64_t completions = 0;
        std::uint64_t peaks = 0;
        std::uint64_t drops = 0;
    };
    std::vector<PerClass> classes;
    double warmup_end = 0.0;
    double end_time = 0.0;
    std::uint64_t events = 0;
};

struct TraceEvent {
    enum class Kind { Arrival, ServiceStart, Completion };
    Kind kind;
    double time;
    std::size_t cls;
    double release;
    bool server_busy;  // after the event
    std::vector<std::size_t> waiting;  // per class, after the event
};

using Observer = std::function<void(const TraceEvent&)>;

/// One replication on stream `index` of cfg.seed. An observer, when given,
/// sees every arrival, service start and completion.
ReplicationResult run_replication(const SystemSpec& spec, Discipline discipline, const SimConfig& cfg,
                                  std::size_t index, const Observer* observer = nullptr);

/// Independent replications aggregated with Student-t intervals. Results are
/// bit-identical for identical inputs regardless of thread count.
SimEstimate simulate(const SystemSpec& spec, Discipline discipline, const SimConfig& cfg);

struct OccupancyProbe {
    std::vector<double> fraction;
    std::vector<double> halfwidth;
};

OccupancyProbe occupancy_probe(const SimEstimate& run);

/// Two-sided Student-t critical value for `confidence` with `dof` degrees.
double student_t_quantile(double confidence, std::size_t dof);

}  // namespace paoi::sim
