#pragma once

#include <string>
#include <variant>
#include <vector>

#include "paoi/rng.hpp"

namespace paoi {

struct Exponential {
    double rate;
    bool operator==(const Exponential&) const = default;
};

struct Deterministic {
    double value;
    bool operator==(const Deterministic&) const = default;
};

struct Uniform {
    double lower;
    double upper;
    bool operator==(const Uniform&) const = default;
};

struct Gamma {
    double shape;
    double rate;
    bool operator==(const Gamma&) const = default;
};

/// A service-time law with a closed-form LST. Parameters are validated on
/// construction; the value is immutable afterwards.
class ServiceDistribution {
public:
    using Law = std::variant<Exponential, Deterministic, Uniform, Gamma>;

    /// Throws ParameterError on an invalid parameterisation.
    explicit ServiceDistribution(Law law);

    static ServiceDistribution exponential(double rate) { return ServiceDistribution(Exponential{rate}); }
    static ServiceDistribution deterministic(double value) { return ServiceDistribution(Deterministic{value}); }
    static ServiceDistribution uniform(double lower, double upper) { return ServiceDistribution(Uniform{lower, upper}); }
    static ServiceDistribution gamma(double shape, double rate) { return ServiceDistribution(Gamma{shape, rate}); }

    const Law& law() const { return law_; }
    bool is_exponential() const { return std::holds_alternative<Exponential>(law_); }

    /// "exponential", "deterministic", "uniform" or "gamma".
    std::string kind() const;

    bool operator==(const ServiceDistribution&) const = default;

private:
    Law law_;
};

/// Finite mixture of service laws, used for the merged higher/lower priority
/// classes of the LCFS analysis.
class MixtureDistribution {
public:
    struct Component {
        double weight;
        ServiceDistribution dist;
    };

    /// Weights must be strictly positive and sum to one within 1e-12.
    explicit MixtureDistribution(std::vector<Component> components);

    const std::vector<Component>& components() const { return components_; }

private:
    std::vector<Component> components_;
};

/// E[exp(-s P)] for s >= 0.
double lst(const ServiceDistribution& d, double s);
double lst(const MixtureDistribution& d, double s);

double mean(const ServiceDistribution& d);
double mean(const MixtureDistribution& d);
double second_moment(const ServiceDistribution& d);
double second_moment(const MixtureDistribution& d);

double sample(const ServiceDistribution& d, Xoshiro256pp& rng);
double sample(const MixtureDistribution& d, Xoshiro256pp& rng);

}  // namespace paoi
