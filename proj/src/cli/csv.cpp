#include "paoi/cli/csv.hpp"

#include <charconv>
#include <cmath>

namespace paoi::cli {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Exact:
            return "exact";
        case Method::Bound:
            return "bound";
        case Method::Sim:
            return "sim";
    }
    return "unknown";
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool dominance_column) {
    out << "sweep_param,sweep_value,discipline,class,method,paoi,ci_halfwidth,E_P,E_W,E_I,E_G";
    if (dominance_column) out << ",bound_minus_sim";
    out << '\n';
    for (const auto& r : rows) {
        out << r.sweep_param << ',' << opt(r.sweep_value) << ',' << sim::to_string(r.discipline) << ',' << r.cls
            << ',' << to_string(r.method) << ',' << format_number(r.paoi) << ',' << opt(r.ci_halfwidth);
        if (r.components) {
            const auto& c = *r.components;
            out << ',' << format_number(c.service) << ',' << format_number(c.buffer_busy) << ','
                << format_number(c.interarrival) << ',' << format_number(c.gap);
        } else {
            out << ",,,,";
        }
        if (dominance_column) out << ',' << opt(r.bound_minus_sim);
        out << '\n';
    }
}

void write_advice_csv(std::ostream& out, const std::vector<AdviceRow>& rows) {
    out << "sweep_param,sweep_value,order_kind,priority_order,average_paoi\n";
    for (const auto& r : rows) {
        out << r.sweep_param << ',' << opt(r.sweep_value) << ',' << r.order_kind << ',';
        for (std::size_t i = 0; i < r.order.size(); ++i) out << (i ? " " : "") << r.order[i];
        out << ',' << format_number(r.average_paoi) << '\n';
    }
}

}  // namespace paoi::cli
