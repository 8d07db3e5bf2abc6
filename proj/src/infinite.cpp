#include "paoi/infinite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "paoi/bounds_mg.hpp"
#include "paoi/errors.hpp"

namespace paoi::infinite {

namespace {

MixtureDistribution merge(const SystemSpec& spec, std::size_t first, std::size_t last, double rate) {
    std::vector<MixtureDistribution::Component> parts;
    double used = 0.0;
    for (std::size_t j = first; j < last; ++j) {
        // The last weight absorbs rounding so the weights sum to one.
        const double w = (j + 1 == last) ? 1.0 - used : spec.arrival_rate(j) / rate;
        used += w;
        parts.push_back({w, spec[j].service});
    }
    return MixtureDistribution(std::move(parts));
}

// Expected time a buffer fed at rate `lambda` stays full during a period of
// length V, if it fills at the first arrival and empties only when V ends:
// E[V] - (1 - E[exp(-lambda V)]) / lambda.
double initial_buffer_busy(double mean_period, double period_lst, double lambda) {
    return mean_period - (1.0 - period_lst) / lambda;
}

}  // namespace

MergedClassView merged_view(const SystemSpec& spec, std::size_t pivot) {
    if (pivot >= spec.size()) throw ParameterError("pivot class out of range");
    double rate_a = 0.0, util_a = 0.0, rate_b = 0.0, util_b = 0.0;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        (j < pivot ? rate_a : rate_b) += spec.arrival_rate(j);
        (j < pivot ? util_a : util_b) += spec.utilization(j);
    }
    MergedClassView view{pivot, rate_a, rate_b, util_a, util_b, std::nullopt,
                         merge(spec, pivot, spec.size(), rate_b), 0.0, 0.0};
    if (pivot > 0) {
        view.service_a = merge(spec, 0, pivot, rate_a);
        view.mean_a = mean(*view.service_a);
    }
    view.mean_b = mean(view.service_b);
    return view;
}

BusyPeriodStats busy_period_stats(const SystemSpec& spec, std::size_t pivot) {
    require_stable(spec);
    const MergedClassView view = merged_view(spec, pivot);
    BusyPeriodStats stats;
    stats.mean_vb = view.mean_b / (1.0 - view.util_a);
    stats.frac_in_vb = view.rate_b * stats.mean_vb;
    if (pivot == 0) {
        // No higher class: every busy period is a V_b period.
        stats.frac_in_va = spec.total_utilization() - stats.frac_in_vb;
        if (stats.frac_in_va < 0.0) stats.frac_in_va = 0.0;
        return stats;
    }
    stats.mean_va = view.mean_a / (1.0 - view.util_a);
    double frac_a = spec.total_utilization() - stats.frac_in_vb;
    if (frac_a < -1e-12) {
        std::ostringstream msg;
        msg << "busy-period split inconsistent: fraction of time in V_a = " << frac_a;
        throw NumericalError(msg.str());
    }
    frac_a = std::max(frac_a, 0.0);
    stats.frac_in_va = frac_a;
    stats.rate_hat_a = frac_a / stats.mean_va;
    return stats;
}

std::pair<double, double> busy_period_lst(const MergedClassView& view, double s) {
    if (s < 0.0) throw ParameterError("LST argument must be >= 0");
    if (!view.service_a) return {1.0, lst(view.service_b, s)};
    // Iterating from 0 increases monotonically to the smallest root, which is
    // the busy-period transform.
    double v = 0.0;
    for (int it = 0; it < 100000; ++it) {
        const double next = lst(*view.service_a, s + view.rate_a * (1.0 - v));
        if (std::abs(next - v) <= 1e-15) {
            v = next;
            return {v, lst(view.service_b, s + view.rate_a * (1.0 - v))};
        }
        v = next;
    }
    throw NumericalError("busy-period transform did not converge");
}

std::vector<PAoIComponents> fcfs_paoi(const SystemSpec& spec) {
    require_stable(spec);
    double residual_work = 0.0;
    for (std::size_t j = 0; j < spec.size(); ++j)
        residual_work += spec.arrival_rate(j) * second_moment(spec[j].service);
    residual_work *= 0.5;

    std::vector<PAoIComponents> out;
    out.reserve(spec.size());
    double above = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double through = above + spec.utilization(i);
        const double wait = residual_work / ((1.0 - through) * (1.0 - above));
        out.push_back(PAoIComponents::from_parts(spec.mean_service(i), wait, 1.0 / spec.arrival_rate(i), 0.0));
        above = through;
    }
    return out;
}

double fcfs_average_paoi(const SystemSpec& spec) {
    const auto per_class = fcfs_paoi(spec);
    double acc = 0.0;
    for (const auto& c : per_class) acc += c.total;
    return acc / static_cast<double>(per_class.size());
}

std::vector<std::size_t> optimal_priority_order(const SystemSpec& spec) {
    std::vector<std::size_t> order(spec.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&spec](std::size_t a, std::size_t b) { return spec.utilization(a) < spec.utilization(b); });
    return order;
}

std::vector<double> lcfs_initial_buffer_probs(const SystemSpec& spec) {
    // Class 1 needs no stability; lower classes go through busy_period_stats,
    // which checks it.
    const std::size_t k = spec.size();
    std::vector<double> p(k);

    // Initial buffer i fills at the first class-i arrival inside a server
    // period and stays full until no higher class is left, i.e. until the
    // V_a / V_b period ends. For class 1 those periods are single services.
    const double lambda1 = spec.arrival_rate(0);
    double top = 0.0;
    for (std::size_t j = 0; j < k; ++j)
        top += spec.arrival_rate(j) *
               initial_buffer_busy(spec.mean_service(j), lst(spec[j].service, lambda1), lambda1);
    p[0] = top;

    for (std::size_t i = 1; i < k; ++i) {
        const MergedClassView view = merged_view(spec, i);
        const BusyPeriodStats busy = busy_period_stats(spec, i);
        const double lambda = spec.arrival_rate(i);
        const auto [va, vb] = busy_period_lst(view, lambda);
        p[i] = busy.rate_hat_a * initial_buffer_busy(busy.mean_va, va, lambda) +
               view.rate_b * initial_buffer_busy(busy.mean_vb, vb, lambda);
    }

    for (std::size_t i = 0; i < k; ++i) {
        if (p[i] < -1e-12 || p[i] > 1.0 + 1e-12) {
            std::ostringstream msg;
            msg << "initial-buffer probability of class " << i + 1 << " = " << p[i] << " lies outside [0,1]";
            throw NumericalError(msg.str());
        }
        p[i] = std::clamp(p[i], 0.0, 1.0);
    }
    return p;
}

std::vector<PAoIComponents> lcfs_paoi_upper_bound(const SystemSpec& spec) {
    require_stable(spec);
    const auto p = lcfs_initial_buffer_probs(spec);
    std::vector<PAoIComponents> out;
    out.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        out.push_back(bounds_mg::jensen_bound(spec.mean_service(i), spec.arrival_rate(i), p[i]));
    return out;
}

}  // namespace paoi::infinite
