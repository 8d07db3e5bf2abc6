#include "paoi/dist.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "paoi/errors.hpp"

namespace paoi {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterError(what);
}

void require_s(double s) {
    if (!(s >= 0.0) || std::isnan(s)) {
        std::ostringstream msg;
        msg << "LST argument must be >= 0, got " << s;
        throw ParameterError(msg.str());
    }
}

// (1 - e^{-x}) / x, with a short Taylor series near zero where the quotient
// cancels.
double one_minus_exp_over(double x) {
    if (x < 1e-8) return 1.0 - x / 2.0 + x * x / 6.0;
    return -std::expm1(-x) / x;
}

}  // namespace

ServiceDistribution::ServiceDistribution(Law law) : law_(law) {
    std::visit(Overloaded{
                   [](const Exponential& e) { require(positive_finite(e.rate), "exponential: rate must be > 0"); },
                   [](const Deterministic& d) {
                       require(positive_finite(d.value), "deterministic: value must be > 0");
                   },
                   [](const Uniform& u) {
                       require(std::isfinite(u.lower) && std::isfinite(u.upper) && u.lower >= 0.0 &&
                                   u.lower < u.upper,
                               "uniform: requires 0 <= lower < upper");
                   },
                   [](const Gamma& g) {
                       require(positive_finite(g.shape), "gamma: shape must be > 0");
                       require(positive_finite(g.rate), "gamma: rate must be > 0");
                   },
               },
               law_);
}

std::string ServiceDistribution::kind() const {
    return std::visit(Overloaded{
                          [](const Exponential&) { return std::string("exponential"); },
                          [](const Deterministic&) { return std::string("deterministic"); },
                          [](const Uniform&) { return std::string("uniform"); },
                          [](const Gamma&) { return std::string("gamma"); },
                      },
                      law_);
}

MixtureDistribution::MixtureDistribution(std::vector<Component> components)
    : components_(std::move(components)) {
    require(!components_.empty(), "mixture: at least one component required");
    double total = 0.0;
    for (const auto& c : components_) {
        require(positive_finite(c.weight), "mixture: weights must be > 0");
        total += c.weight;
    }
    require(std::abs(total - 1.0) <= 1e-12, "mixture: weights must sum to 1");
}

double lst(const ServiceDistribution& d, double s) {
    require_s(s);
    return std::visit(Overloaded{
                          [s](const Exponential& e) { return e.rate / (e.rate + s); },
                          [s](const Deterministic& v) { return std::exp(-s * v.value); },
                          [s](const Uniform& u) {
                              return std::exp(-s * u.lower) * one_minus_exp_over(s * (u.upper - u.lower));
                          },
                          [s](const Gamma& g) { return std::exp(-g.shape * std::log1p(s / g.rate)); },
                      },
                      d.law());
}

double lst(const MixtureDistribution& d, double s) {
    double acc = 0.0;
    for (const auto& c : d.components()) acc += c.weight * lst(c.dist, s);
    return acc;
}

double mean(const ServiceDistribution& d) {
    return std::visit(Overloaded{
                          [](const Exponential& e) { return 1.0 / e.rate; },
                          [](const Deterministic& v) { return v.value; },
                          [](const Uniform& u) { return 0.5 * (u.lower + u.upper); },
                          [](const Gamma& g) { return g.shape / g.rate; },
                      },
                      d.law());
}

double second_moment(const ServiceDistribution& d) {
    return std::visit(Overloaded{
                          [](const Exponential& e) { return 2.0 / (e.rate * e.rate); },
                          [](const Deterministic& v) { return v.value * v.value; },
                          [](const Uniform& u) {
                              return (u.lower * u.lower + u.lower * u.upper + u.upper * u.upper) / 3.0;
                          },
                          [](const Gamma& g) { return g.shape * (g.shape + 1.0) / (g.rate * g.rate); },
                      },
                      d.law());
}

double mean(const MixtureDistribution& d) {
    double acc = 0.0;
    for (const auto& c : d.components()) acc += c.weight * mean(c.dist);
    return acc;
}

double second_moment(const MixtureDistribution& d) {
    double acc = 0.0;
    for (const auto& c : d.components()) acc += c.weight * second_moment(c.dist);
    return acc;
}

double sample(const ServiceDistribution& d, Xoshiro256pp& rng) {
    return std::visit(Overloaded{
                          [&rng](const Exponential& e) { return -std::log(rng.uniform_pos()) / e.rate; },
                          [](const Deterministic& v) { return v.value; },
                          [&rng](const Uniform& u) {
                              const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                              return u.lower + (u.upper - u.lower) * unit;
                          },
                          [&rng](const Gamma& g) {
                              std::gamma_distribution<double> draw(g.shape, 1.0 / g.rate);
                              return draw(rng);
                          },
                      },
                      d.law());
}

double sample(const MixtureDistribution& d, Xoshiro256pp& rng) {
    const auto& comps = d.components();
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    for (const auto& c : comps) {
        if (u < c.weight) return sample(c.dist, rng);
        u -= c.weight;
    }
    return sample(comps.back().dist, rng);
}

}  // namespace paoi
