#include "paoi/system.hpp"

#include <cmath>
#include <sstream>

#include "paoi/errors.hpp"

namespace paoi {

SystemSpec::SystemSpec(std::vector<ClassSpec> classes) : classes_(std::move(classes)) {
    if (classes_.empty()) throw ParameterError("system must have at least one class");
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        const double rate = classes_[i].arrival_rate;
        if (!(std::isfinite(rate) && rate > 0.0)) {
            std::ostringstream msg;
            msg << "class " << i + 1 << ": arrival rate must be > 0";
            throw ParameterError(msg.str());
        }
    }
}

double SystemSpec::total_utilization() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += utilization(i);
    return acc;
}

double SystemSpec::total_arrival_rate() const {
    double acc = 0.0;
    for (const auto& c : classes_) acc += c.arrival_rate;
    return acc;
}

bool SystemSpec::all_exponential() const {
    for (const auto& c : classes_)
        if (!c.service.is_exponential()) return false;
    return true;
}

std::optional<ServiceDistribution> SystemSpec::common_service() const {
    for (const auto& c : classes_)
        if (!(c.service == classes_.front().service)) return std::nullopt;
    return classes_.front().service;
}

SystemSpec SystemSpec::reordered(const std::vector<std::size_t>& order) const {
    std::vector<ClassSpec> out;
    out.reserve(order.size());
    for (std::size_t idx : order) out.push_back(classes_.at(idx));
    return SystemSpec(std::move(out));
}

void require_stable(const SystemSpec& spec) {
    double partial = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        partial += spec.utilization(i);
        if (partial >= 1.0) {
            std::ostringstream msg;
            msg << "unstable system: sum of rho over classes 1.." << i + 1 << " = " << partial << " >= 1";
            throw StabilityError(msg.str());
        }
    }
}

}  // namespace paoi
