#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "paoi/sim.hpp"
#include "paoi/system.hpp"

namespace paoi::cli {

inline constexpr int kCsvSchemaVersion = 1;

enum class Method { Exact, Bound, Sim };

std::string_view to_string(Method m);

struct ResultRow {
    std::string sweep_param;  // empty without a sweep
    std::optional<double> sweep_value;
    sim::Discipline discipline = sim::Discipline::Buffer1Replace;
    std::size_t cls = 1;  // 1-based
    Method method = Method::Exact;
    double paoi = 0.0;
    std::optional<double> ci_halfwidth;
    std::optional<PAoIComponents> components;
    std::optional<double> bound_minus_sim;
};

/// Shortest round-trip decimal representation.
std::string format_number(double v);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool dominance_column);

struct AdviceRow {
    std::string sweep_param;
    std::optional<double> sweep_value;
    std::string order_kind;  // "given" or "recommended"
    std::vector<std::size_t> order;  // 1-based class labels, highest priority first
    double average_paoi = 0.0;
};

void write_advice_csv(std::ostream& out, const std::vector<AdviceRow>& rows);

}  // namespace paoi::cli
