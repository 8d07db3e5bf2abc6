#include "paoi/bounds_mg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "paoi/errors.hpp"
#include "stationary_solve.hpp"

namespace paoi::bounds_mg {

namespace {

constexpr double kResidualTolerance = 1e-10;

ServiceDistribution require_common_service(const SystemSpec& spec) {
    auto common = spec.common_service();
    if (!common)
        throw UnsupportedModelError(
            "embedded-chain bounds need one service law shared by all classes; use simulate "
            "(or exact for exponential service)");
    return *common;
}

std::uint32_t pattern_from_rank(std::uint32_t rank, std::size_t l) {
    std::uint32_t occupied = 0;
    for (std::size_t i = 0; i < l; ++i)
        if ((rank >> (l - 1 - i)) & 1U) occupied |= 1U << i;
    return occupied;
}

std::uint32_t pattern_rank(std::uint32_t occupied, std::size_t l) {
    std::uint32_t rank = 0;
    for (std::size_t i = 0; i < l; ++i) rank = (rank << 1) | ((occupied >> i) & 1U);
    return rank;
}

double rate_of(const std::vector<double>& lambda, std::uint32_t mask) {
    double acc = 0.0;
    for (std::size_t i = 0; mask != 0; ++i, mask >>= 1)
        if (mask & 1U) acc += lambda[i];
    return acc;
}

// Distribution of the occupancy left behind by one service, given the set of
// buffers `kept` that stay full throughout it. Target T (a superset of kept)
// has probability E[prod_{j in T\kept} (1-e^{-l_j P}) prod_{j notin T} e^{-l_j P}],
// expanded by inclusion-exclusion into LST values.
std::vector<std::pair<std::uint32_t, double>> after_service(const ServiceDistribution& service,
                                                            const std::vector<double>& lambda,
                                                            std::uint32_t kept, std::size_t l) {
    const std::uint32_t all = (1U << l) - 1U;
    const std::uint32_t free = all & ~kept;
    std::vector<std::pair<std::uint32_t, double>> out;
    // Enumerate subsets `fill` of the free buffers.
    std::uint32_t fill = 0;
    do {
        const std::uint32_t target = kept | fill;
        const double untouched = rate_of(lambda, all & ~target);
        double prob = 0.0;
        std::uint32_t sub = 0;
        do {
            const double sign = (std::popcount(sub) % 2 == 0) ? 1.0 : -1.0;
            prob += sign * lst(service, untouched + rate_of(lambda, sub));
            sub = (sub - fill) & fill;
        } while (sub != 0);
        out.emplace_back(target, std::max(prob, 0.0));
        fill = (fill - free) & free;
    } while (fill != 0);
    return out;
}

}  // namespace

DepartureChain build_departure_chain(const SystemSpec& spec, std::size_t l) {
    if (l == 0 || l > spec.size() || l > kMaxClasses) {
        std::ostringstream msg;
        msg << "subsystem size must be in 1.." << std::min(spec.size(), kMaxClasses) << ", got " << l;
        throw ParameterError(msg.str());
    }
    const ServiceDistribution service = require_common_service(spec);
    std::vector<double> lambda(l);
    for (std::size_t i = 0; i < l; ++i) lambda[i] = spec.arrival_rate(i);

    const std::uint32_t count = 1U << l;
    DepartureChain chain;
    chain.subsystem_size = l;
    chain.states.resize(count);
    for (std::uint32_t r = 0; r < count; ++r) chain.states[r] = pattern_from_rank(r, l);

    std::unordered_map<std::uint32_t, std::vector<std::pair<std::uint32_t, double>>> cache;
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::uint32_t r = 0; r < count; ++r) {
        const std::uint32_t occ = chain.states[r];
        // The highest-priority waiting packet is served next; an empty system
        // serves the next arrival, which leaves every buffer empty as well.
        const std::uint32_t kept = occ == 0 ? 0U : occ & (occ - 1U);
        auto it = cache.find(kept);
        if (it == cache.end()) it = cache.emplace(kept, after_service(service, lambda, kept, l)).first;
        for (const auto& [target, prob] : it->second) {
            if (prob > 0.0)
                triplets.emplace_back(static_cast<int>(r), static_cast<int>(pattern_rank(target, l)), prob);
        }
    }
    chain.transition.resize(count, count);
    chain.transition.setFromTriplets(triplets.begin(), triplets.end());
    return chain;
}

Eigen::VectorXd chain_stationary(const DepartureChain& chain) {
    const auto n = chain.transition.rows();
    Eigen::SparseMatrix<double, Eigen::RowMajor> identity(n, n);
    identity.setIdentity();
    const detail::SparseRow generator = chain.transition - identity;
    return detail::solve_left_null(generator, kResidualTolerance).probs;
}

double zero_state_prob(const DepartureChain& chain) { return chain_stationary(chain)(0); }

RejectionProfile rejection_probs(const SystemSpec& spec) {
    const ServiceDistribution service = require_common_service(spec);
    const std::size_t k = spec.size();
    if (k > kMaxClasses) throw ParameterError("embedded-chain bounds support at most 12 classes");
    const double mu = 1.0 / mean(service);
    const double total = spec.total_arrival_rate();

    std::vector<double> empty(k + 1, 1.0);
    for (std::size_t l = 1; l <= k; ++l) empty[l] = zero_state_prob(build_departure_chain(spec, l));
    const double empty_k = empty[k];

    RejectionProfile profile;
    profile.p.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double lambda = spec.arrival_rate(i);
        double p = 1.0 - (empty[i] - empty[i + 1]) / (lambda / mu + lambda / total * empty_k) -
                   empty_k / (total / mu + empty_k);
        if (p < 0.0 && p > -1e-12) p = 0.0;
        profile.p[i] = p;
    }
    return profile;
}

PAoIComponents jensen_bound(double mean_service, double arrival_rate, double p) {
    if (!(p >= 0.0)) throw ParameterError("rejection probability must be >= 0");
    if (1.0 - p < 1e-12) throw NumericalError("PAoI bound diverges: rejection probability is 1");
    const double ratio = p / (1.0 - p);
    return PAoIComponents::from_parts(mean_service, ratio / arrival_rate, 1.0 / arrival_rate,
                                      -std::expm1(-ratio) / arrival_rate);
}

std::vector<PAoIComponents> paoi_upper_bound(const SystemSpec& spec, const RejectionProfile& profile) {
    if (profile.p.size() != spec.size()) throw ParameterError("rejection profile size does not match spec");
    std::vector<PAoIComponents> out;
    out.reserve(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i)
        out.push_back(jensen_bound(spec.mean_service(i), spec.arrival_rate(i), profile.p[i]));
    return out;
}

LimitReport limit_diagnostics(const SystemSpec& spec, std::size_t cls, const std::vector<double>& exponents) {
    if (cls >= spec.size()) throw ParameterError("scaled class out of range");
    if (exponents.empty()) throw ParameterError("scale grid must be nonempty");
    const std::size_t k = spec.size();
    LimitReport report;
    report.scaled_class = cls;
    report.exponents = exponents;
    for (double t : exponents) {
        std::vector<ClassSpec> classes = spec.classes();
        classes[cls].arrival_rate *= std::pow(10.0, t);
        const SystemSpec scaled(std::move(classes));
        const auto profile = rejection_probs(scaled);
        std::vector<double> row(k);
        for (std::size_t j = 0; j < k; ++j) {
            const double p = profile.p[j];
            row[j] = (1.0 - p < 1e-12)
                         ? std::numeric_limits<double>::infinity()
                         : jensen_bound(scaled.mean_service(j), scaled.arrival_rate(j), p).total;
        }
        report.bounds.push_back(std::move(row));
    }
    report.sup.assign(k, 0.0);
    report.relative_variation.assign(k, 0.0);
    report.strictly_increasing.assign(k, true);
    for (std::size_t j = 0; j < k; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t n = 0; n < report.bounds.size(); ++n) {
            const double v = report.bounds[n][j];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            if (n > 0 && !(v > report.bounds[n - 1][j])) report.strictly_increasing[j] = false;
        }
        report.sup[j] = hi;
        report.relative_variation[j] = (hi - lo) / lo;
    }
    return report;
}

}  // namespace paoi::bounds_mg
