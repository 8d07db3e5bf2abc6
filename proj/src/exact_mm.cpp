#include "paoi/exact_mm.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "paoi/errors.hpp"
#include "stationary_solve.hpp"

namespace paoi::exact_mm {

namespace {

constexpr double kResidualTolerance = 1e-9;
constexpr double kDegenerate = 1e-12;

void require_class_count(std::size_t k) {
    if (k == 0 || k > kMaxClasses) {
        std::ostringstream msg;
        msg << "buffer-state CTMC supports 1.." << kMaxClasses << " classes, got " << k;
        throw ParameterError(msg.str());
    }
}

void require_exponential(const SystemSpec& spec) {
    if (!spec.all_exponential())
        throw UnsupportedModelError(
            "exact buffer-one analysis needs exponential service for every class; use bounds or simulate");
}

void require_class(const SystemSpec& spec, std::size_t cls) {
    if (cls >= spec.size()) {
        std::ostringstream msg;
        msg << "class index " << cls + 1 << " out of range 1.." << spec.size();
        throw ParameterError(msg.str());
    }
}

// Lexicographic rank of the buffer pattern with B_1 as the most significant bit.
std::uint32_t pattern_rank(std::uint32_t occupied, std::size_t k) {
    std::uint32_t rank = 0;
    for (std::size_t i = 0; i < k; ++i) rank = (rank << 1) | ((occupied >> i) & 1U);
    return rank;
}

std::uint32_t pattern_from_rank(std::uint32_t rank, std::size_t k) {
    std::uint32_t occupied = 0;
    for (std::size_t i = 0; i < k; ++i)
        if ((rank >> (k - 1 - i)) & 1U) occupied |= 1U << i;
    return occupied;
}

bool top_two_identical(const SystemSpec& spec) {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
    return spec.size() >= 2 && close(spec.arrival_rate(0), spec.arrival_rate(1)) &&
           close(spec.mean_service(0), spec.mean_service(1));
}

}  // namespace

std::vector<BufferState> enumerate_states(std::size_t k) {
    require_class_count(k);
    const std::uint32_t patterns = 1U << k;
    std::vector<BufferState> states;
    states.reserve(1 + k * patterns);
    states.push_back({0, 0});
    for (std::size_t j = 1; j <= k; ++j)
        for (std::uint32_t r = 0; r < patterns; ++r)
            states.push_back({static_cast<int>(j), pattern_from_rank(r, k)});
    return states;
}

std::size_t state_index(const BufferState& state, std::size_t k) {
    if (state.serving == 0) return 0;
    return 1 + (static_cast<std::size_t>(state.serving) - 1) * (std::size_t{1} << k) +
           pattern_rank(state.occupied, k);
}

RateMatrix build_rate_matrix(const SystemSpec& spec) {
    require_exponential(spec);
    const std::size_t k = spec.size();
    const auto states = enumerate_states(k);
    const auto n = static_cast<Eigen::Index>(states.size());

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(states.size() * (k + 2));
    for (std::size_t row = 0; row < states.size(); ++row) {
        const BufferState& s = states[row];
        double exit = 0.0;
        auto add = [&](const BufferState& to, double rate) {
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(state_index(to, k)), rate);
            exit += rate;
        };
        for (std::size_t i = 0; i < k; ++i) {
            if (s.serving == 0) {
                add({static_cast<int>(i + 1), 0}, spec.arrival_rate(i));
            } else if (!s.full(i)) {
                add({s.serving, s.occupied | (1U << i)}, spec.arrival_rate(i));
            }
        }
        if (s.serving != 0) {
            const double mu = 1.0 / spec.mean_service(static_cast<std::size_t>(s.serving - 1));
            if (s.occupied == 0) {
                add({0, 0}, mu);
            } else {
                const int next = std::countr_zero(s.occupied);
                add({next + 1, s.occupied & ~(1U << next)}, mu);
            }
        }
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(row), -exit);
    }
    RateMatrix q(n, n);
    q.setFromTriplets(triplets.begin(), triplets.end());
    return q;
}

std::size_t StationaryDistribution::classes() const {
    std::size_t k = 1;
    while (1 + k * (std::size_t{1} << k) < states.size()) ++k;
    return k;
}

double StationaryDistribution::operator[](const BufferState& s) const {
    return probs(static_cast<Eigen::Index>(state_index(s, classes())));
}

StationaryDistribution stationary(const RateMatrix& q) {
    std::size_t k = 0;
    for (std::size_t c = 1; c <= kMaxClasses; ++c) {
        if (static_cast<Eigen::Index>(1 + c * (std::size_t{1} << c)) == q.rows()) k = c;
    }
    if (k == 0 || q.rows() != q.cols())
        throw ParameterError("rate matrix dimension does not match any buffer-state space");
    auto solved = detail::solve_left_null(q, kResidualTolerance);
    return {enumerate_states(k), std::move(solved.probs), solved.residual};
}

double buffer_full_prob(const SystemSpec& spec, const StationaryDistribution& pi, std::size_t cls) {
    require_class(spec, cls);
    double p = 0.0;
    for (std::size_t n = 0; n < pi.states.size(); ++n)
        if (pi.states[n].full(cls)) p += pi.probs(static_cast<Eigen::Index>(n));
    return p;
}

double expected_buffer_busy(const SystemSpec& spec, double p, std::size_t cls) {
    require_class(spec, cls);
    if (!(p >= 0.0)) throw ParameterError("buffer-full probability must be >= 0");
    if (1.0 - p < kDegenerate) throw NumericalError("E[W] diverges: buffer-full probability is 1");
    return p / (spec.arrival_rate(cls) * (1.0 - p));
}

double eta1(const ServiceDistribution& service, double lambda, double s) {
    const double shifted = lst(service, s + lambda);
    return shifted / (1.0 - lst(service, s) + shifted);
}

std::pair<double, double> eta12(const ServiceDistribution& service, double lambda, double s) {
    const double p0 = lst(service, s);
    const double p1 = lst(service, s + lambda);
    const double p2 = lst(service, s + 2.0 * lambda);
    const double refill = p1 / (1.0 - p0 + p1);
    const double empty_start = p2 / (1.0 - 2.0 * (p1 - p2) - refill * (p0 - 2.0 * p1 + p2));
    return {empty_start, empty_start * refill};
}

double w_lst(const SystemSpec& spec, const StationaryDistribution& pi, std::size_t cls, double s) {
    require_exponential(spec);
    require_class(spec, cls);
    if (cls > 2)
        throw UnsupportedModelError("exact buffer-busy LST is only available for the top three classes");
    if (cls == 2 && !top_two_identical(spec))
        throw UnsupportedModelError(
            "exact analysis of class 3 requires lambda_1 = lambda_2 and mu_1 = mu_2; use bounds or simulate");
    if (s < 0.0) throw ParameterError("LST argument must be >= 0");

    const double lambda1 = spec.arrival_rate(0);
    const ServiceDistribution& top = spec[0].service;
    double busy1 = 0.0;
    std::pair<double, double> busy12{0.0, 0.0};
    if (cls == 1) busy1 = eta1(top, lambda1, s);
    if (cls == 2) busy12 = eta12(top, lambda1, s);

    double weight = 0.0;
    double acc = 0.0;
    for (std::size_t n = 0; n < pi.states.size(); ++n) {
        const BufferState& st = pi.states[n];
        if (st.full(cls)) continue;
        const double prob = pi.probs(static_cast<Eigen::Index>(n));
        weight += prob;
        if (st.serving == 0) {
            acc += prob;
            continue;
        }
        const ServiceDistribution& in_service = spec[static_cast<std::size_t>(st.serving - 1)].service;
        const double r0 = lst(in_service, s);
        double term = 0.0;
        if (cls == 0) {
            term = r0;
        } else if (cls == 1) {
            const double r1 = lst(in_service, s + lambda1);
            term = st.full(0) ? r0 * busy1 : r0 * busy1 - r1 * busy1 + r1;
        } else {
            const auto [e0, e1] = busy12;
            const double r1 = lst(in_service, s + lambda1);
            const double r2 = lst(in_service, s + 2.0 * lambda1);
            switch (static_cast<int>(st.full(0)) + static_cast<int>(st.full(1))) {
                case 0:
                    term = r2 + 2.0 * (r1 - r2) * e0 + (r0 - 2.0 * r1 + r2) * e1;
                    break;
                case 1:
                    term = r1 * e0 + (r0 - r1) * e1;
                    break;
                default:
                    term = r0 * e1;
                    break;
            }
        }
        acc += prob * term;
    }
    if (weight < kDegenerate)
        throw NumericalError("conditioning on an empty buffer: probability below 1e-12");
    return acc / weight;
}

PAoIComponents paoi_exact(const SystemSpec& spec, std::size_t cls) {
    require_exponential(spec);
    require_class(spec, cls);
    return paoi_exact(spec, stationary(build_rate_matrix(spec)), cls);
}

PAoIComponents paoi_exact(const SystemSpec& spec, const StationaryDistribution& pi, std::size_t cls) {
    const double lambda = spec.arrival_rate(cls);
    const double gap_lst = w_lst(spec, pi, cls, lambda);
    const double p = buffer_full_prob(spec, pi, cls);
    return PAoIComponents::from_parts(spec.mean_service(cls), expected_buffer_busy(spec, p, cls),
                                      1.0 / lambda, (1.0 - gap_lst) / lambda);
}

bool exact_supported(const SystemSpec& spec, std::size_t cls) {
    if (!spec.all_exponential() || spec.size() > kMaxClasses || cls >= spec.size()) return false;
    if (cls < 2) return true;
    return cls == 2 && top_two_identical(spec);
}

}  // namespace paoi::exact_mm
