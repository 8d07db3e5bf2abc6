#include "paoi/sim.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cassert>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "paoi/errors.hpp"
#include "paoi/rng.hpp"

namespace paoi::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ClassState {
    // Buffer1Replace: the slot. LcfsInfinite: the initial buffer.
    bool slot_full = false;
    double slot_release = 0.0;
    std::deque<double> fifo;    // FcfsInfinite
    std::vector<double> stack;  // LcfsInfinite main queue, newest at the back

    double next_arrival = kInf;
    double newest_processed = -kInf;

    std::uint64_t warm_completions = 0;
    // Statistics, collected after warm-up only.
    double peak_sum = 0.0;
    std::uint64_t peaks = 0;
    double wait_sum = 0.0;
    std::uint64_t completions = 0;
    std::uint64_t drops = 0;
    double occupied_time = 0.0;
    double occupied_since = 0.0;

    std::size_t waiting(Discipline d) const {
        switch (d) {
            case Discipline::Buffer1Replace:
                return slot_full ? 1 : 0;
            case Discipline::FcfsInfinite:
                return fifo.size();
            case Discipline::LcfsInfinite:
                return stack.size() + (slot_full ? 1 : 0);
        }
        return 0;
    }

    bool occupied(Discipline d) const {
        return d == Discipline::FcfsInfinite ? !fifo.empty() : slot_full;
    }
};

class Engine {
public:
    Engine(const SystemSpec& spec, Discipline discipline, const SimConfig& cfg, std::size_t index,
           const Observer* observer)
        : spec_(spec),
          discipline_(discipline),
          cfg_(cfg),
          observer_(observer),
          rng_(replication_stream(cfg.seed, index)),
          classes_(spec.size()) {
        for (std::size_t c = 0; c < classes_.size(); ++c) classes_[c].next_arrival = draw_interarrival(c);
        measuring_ = cfg.warmup_completions == 0;
    }

    ReplicationResult run() {
        while (!done()) {
            std::size_t next_class = 0;
            double next_arrival = kInf;
            for (std::size_t c = 0; c < classes_.size(); ++c) {
                if (classes_[c].next_arrival < next_arrival) {
                    next_arrival = classes_[c].next_arrival;
                    next_class = c;
                }
            }
            ++events_;
            if (busy_ && completion_time_ <= next_arrival) {
                assert(completion_time_ >= now_);
                now_ = completion_time_;
                complete();
            } else {
                assert(next_arrival >= now_);
                now_ = next_arrival;
                arrive(next_class);
            }
        }
        return finish();
    }

private:
    double draw_interarrival(std::size_t c) { return now_ - std::log(rng_.uniform_pos()) / spec_.arrival_rate(c); }

    bool done() const {
        if (!measuring_) return false;
        for (const auto& cs : classes_)
            if (cs.peaks < cfg_.completions_per_replication) return false;
        return true;
    }

    void set_occupied(std::size_t c, bool before) {
        ClassState& cs = classes_[c];
        const bool after = cs.occupied(discipline_);
        if (!measuring_ || before == after) return;
        if (after)
            cs.occupied_since = now_;
        else
            cs.occupied_time += now_ - cs.occupied_since;
    }

    void notify(TraceEvent::Kind kind, std::size_t c, double release) {
        if (observer_ == nullptr) return;
        TraceEvent ev{kind, now_, c, release, busy_, {}};
        ev.waiting.reserve(classes_.size());
        for (const auto& cs : classes_) ev.waiting.push_back(cs.waiting(discipline_));
        (*observer_)(ev);
    }

    void arrive(std::size_t c) {
        ClassState& cs = classes_[c];
        const double release = now_;
        cs.next_arrival = draw_interarrival(c);
        if (!busy_) {
            notify(TraceEvent::Kind::Arrival, c, release);
            start_service(c, release);
            return;
        }
        const bool before = cs.occupied(discipline_);
        switch (discipline_) {
            case Discipline::Buffer1Replace:
                if (cs.slot_full && measuring_) ++cs.drops;
                cs.slot_full = true;
                cs.slot_release = release;
                break;
            case Discipline::FcfsInfinite:
                cs.fifo.push_back(release);
                break;
            case Discipline::LcfsInfinite:
                if (cs.slot_full) cs.stack.push_back(cs.slot_release);
                cs.slot_full = true;
                cs.slot_release = release;
                break;
        }
        set_occupied(c, before);
        if (cs.waiting(discipline_) > cfg_.max_queue_length) {
            std::ostringstream msg;
            msg << "class " << c + 1 << " queue exceeded " << cfg_.max_queue_length
                << " packets; the system appears unstable";
            throw StabilityError(msg.str());
        }
        notify(TraceEvent::Kind::Arrival, c, release);
    }

    void start_service(std::size_t c, double release) {
        busy_ = true;
        serving_ = c;
        serving_release_ = release;
        serving_start_ = now_;
        completion_time_ = now_ + sample(spec_[c].service, rng_);
        notify(TraceEvent::Kind::ServiceStart, c, release);
    }

    void complete() {
        const std::size_t c = serving_;
        ClassState& cs = classes_[c];
        const double release = serving_release_;
        busy_ = false;
        completion_time_ = kInf;

        // A peak of the age process occurs only where a completion lowers it.
        if (release > cs.newest_processed) {
            if (measuring_ && cs.newest_processed > -kInf) {
                cs.peak_sum += now_ - cs.newest_processed;
                ++cs.peaks;
            }
            cs.newest_processed = release;
        }
        if (measuring_) {
            cs.wait_sum += serving_start_ - release;
            ++cs.completions;
        } else {
            ++cs.warm_completions;
            maybe_end_warmup();
        }
        notify(TraceEvent::Kind::Completion, c, release);

        for (std::size_t n = 0; n < classes_.size(); ++n) {
            ClassState& next = classes_[n];
            if (next.waiting(discipline_) == 0) continue;
            const bool before = next.occupied(discipline_);
            double next_release = 0.0;
            switch (discipline_) {
                case Discipline::Buffer1Replace:
                    next_release = next.slot_release;
                    next.slot_full = false;
                    break;
                case Discipline::FcfsInfinite:
                    next_release = next.fifo.front();
                    next.fifo.pop_front();
                    break;
                case Discipline::LcfsInfinite:
                    if (next.slot_full) {
                        next_release = next.slot_release;
                        next.slot_full = false;
                    } else {
                        next_release = next.stack.back();
                        next.stack.pop_back();
                    }
                    break;
            }
            set_occupied(n, before);
            start_service(n, next_release);
            return;
        }
    }

    void maybe_end_warmup() {
        for (const auto& cs : classes_)
            if (cs.warm_completions < cfg_.warmup_completions) return;
        measuring_ = true;
        warmup_end_ = now_;
        for (auto& cs : classes_) cs.occupied_since = now_;
    }

    ReplicationResult finish() {
        ReplicationResult out;
        out.warmup_end = warmup_end_;
        out.end_time = now_;
        out.events = events_;
        const double span = now_ - warmup_end_;
        for (auto& cs : classes_) {
            if (cs.occupied(discipline_)) cs.occupied_time += now_ - cs.occupied_since;
            ReplicationResult::PerClass pc;
            pc.paoi_mean = cs.peaks ? cs.peak_sum / static_cast<double>(cs.peaks) : 0.0;
            pc.wait_mean = cs.completions ? cs.wait_sum / static_cast<double>(cs.completions) : 0.0;
            pc.occupancy = span > 0.0 ? cs.occupied_time / span : 0.0;
            pc.completions = cs.completions;
            pc.peaks = cs.peaks;
            pc.drops = cs.drops;
            out.classes.push_back(pc);
        }
        return out;
    }

    const SystemSpec& spec_;
    Discipline discipline_;
    const SimConfig& cfg_;
    const Observer* observer_;
    Xoshiro256pp rng_;
    std::vector<ClassState> classes_;

    double now_ = 0.0;
    bool busy_ = false;
    std::size_t serving_ = 0;
    double serving_release_ = 0.0;
    double serving_start_ = 0.0;
    double completion_time_ = kInf;
    bool measuring_ = false;
    double warmup_end_ = 0.0;
    std::uint64_t events_ = 0;
};

struct MeanAndHalfwidth {
    double mean;
    double halfwidth;
};

MeanAndHalfwidth summarize(const std::vector<double>& xs, double t_crit) {
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double m = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {m, t_crit * sd / std::sqrt(n)};
}

}  // namespace

std::string_view to_string(Discipline d) {
    switch (d) {
        case Discipline::Buffer1Replace:
            return "buffer1_replace";
        case Discipline::FcfsInfinite:
            return "fcfs";
        case Discipline::LcfsInfinite:
            return "lcfs";
    }
    return "unknown";
}

std::optional<Discipline> parse_discipline(std::string_view name) {
    if (name == "buffer1_replace") return Discipline::Buffer1Replace;
    if (name == "fcfs") return Discipline::FcfsInfinite;
    if (name == "lcfs") return Discipline::LcfsInfinite;
    return std::nullopt;
}

void SimConfig::validate() const {
    if (replications < 2) throw ParameterError("sim.replications must be >= 2");
    if (completions_per_replication == 0) throw ParameterError("sim.completions_per_replication must be > 0");
    if (warmup_completions >= completions_per_replication)
        throw ParameterError("sim.warmup_completions must be < sim.completions_per_replication");
    if (!(confidence_level > 0.0 && confidence_level < 1.0))
        throw ParameterError("sim.confidence_level must be in (0,1)");
    if (max_queue_length == 0) throw ParameterError("sim.max_queue_length must be > 0");
}

double student_t_quantile(double confidence, std::size_t dof) {
    if (dof == 0) throw ParameterError("Student-t needs at least one degree of freedom");
    const boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.5 + 0.5 * confidence);
}

ReplicationResult run_replication(const SystemSpec& spec, Discipline discipline, const SimConfig& cfg,
                                  std::size_t index, const Observer* observer) {
    cfg.validate();
    Engine engine(spec, discipline, cfg, index, observer);
    return engine.run();
}

SimEstimate simulate(const SystemSpec& spec, Discipline discipline, const SimConfig& cfg) {
    cfg.validate();
    const std::size_t reps = cfg.replications;
    std::vector<ReplicationResult> results(reps);
    std::vector<std::exception_ptr> errors(reps);

    unsigned workers = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, reps));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t r = next++; r < reps; r = next++) {
            try {
                results[r] = run_replication(spec, discipline, cfg, r);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const double t_crit = student_t_quantile(cfg.confidence_level, reps - 1);
    SimEstimate est;
    est.discipline = discipline;
    est.confidence_level = cfg.confidence_level;
    est.replications = reps;
    for (std::size_t c = 0; c < spec.size(); ++c) {
        std::vector<double> paoi, occ, wait;
        ClassEstimate ce;
        for (const auto& r : results) {
            const auto& pc = r.classes[c];
            paoi.push_back(pc.paoi_mean);
            occ.push_back(pc.occupancy);
            wait.push_back(pc.wait_mean);
            ce.completions += pc.completions;
            ce.peaks += pc.peaks;
            ce.drops += pc.drops;
        }
        const auto a = summarize(paoi, t_crit);
        const auto o = summarize(occ, t_crit);
        const auto w = summarize(wait, t_crit);
        ce.paoi_mean = a.mean;
        ce.ci_halfwidth = a.halfwidth;
        ce.buffer_full_fraction = o.mean;
        ce.occupancy_halfwidth = o.halfwidth;
        ce.wait_mean = w.mean;
        ce.wait_halfwidth = w.halfwidth;
        est.classes.push_back(ce);
    }
    return est;
}

OccupancyProbe occupancy_probe(const SimEstimate& run) {
    OccupancyProbe probe;
    for (const auto& c : run.classes) {
        probe.fraction.push_back(c.buffer_full_fraction);
        probe.halfwidth.push_back(c.occupancy_halfwidth);
    }
    return probe;
}

}  // namespace paoi::sim
