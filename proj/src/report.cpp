#include "ultraweight/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace ultraweight {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::HoldsOnHorizon: return "HoldsOnHorizon";
    case Verdict::FailsOnHorizon: return "FailsOnHorizon";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "HoldsOnHorizon") return Verdict::HoldsOnHorizon;
    if (s == "FailsOnHorizon") return Verdict::FailsOnHorizon;
    if (s == "Inconclusive") return Verdict::Inconclusive;
    throw InvalidInput("unknown verdict '" + s + "'");
}

Verdict series_verdict(const std::vector<SeriesPoint>& series) {
    const std::size_t n = series.size();
    if (n < 3) return Verdict::Inconclusive;
    if (std::isinf(series.back().value) && series.back().value > 0) return Verdict::FailsOnHorizon;

    auto inc = [&](std::size_t back) {  // increment ending `back` steps before the end
        return series[n - 1 - back].value - series[n - 2 - back].value;
    };
    const double plateau = std::log1p(SeriesConvention::plateau);
    const double growth = std::log1p(SeriesConvention::growth);
    const double rho = SeriesConvention::decay;

    const double d1 = inc(0);
    const double d2 = inc(1);
    if (d1 <= plateau && d2 <= plateau) return Verdict::HoldsOnHorizon;
    if (n >= 4) {
        const double d3 = inc(2);
        if (d2 > 0 && d1 <= rho * d2 && d2 <= rho * d3) return Verdict::HoldsOnHorizon;
    }
    if (std::max(d1, d2) >= growth) return Verdict::FailsOnHorizon;
    return Verdict::Inconclusive;
}

std::vector<std::size_t> prefix_schedule(std::size_t range,
                                         const std::vector<std::size_t>& checkpoints) {
    std::vector<std::size_t> in_range;
    for (auto c : checkpoints)
        if (c >= 4 && c <= range) in_range.push_back(c);
    std::sort(in_range.begin(), in_range.end());
    in_range.erase(std::unique(in_range.begin(), in_range.end()), in_range.end());
    if (in_range.size() >= 3) return in_range;

    std::vector<std::size_t> out;
    for (std::size_t r = range; r >= 4 && out.size() < 8; r /= 2) out.push_back(r);
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<SeriesPoint> running_max_series(const std::vector<double>& terms,
                                            const std::vector<std::size_t>& schedule,
                                            double floor_value) {
    std::vector<SeriesPoint> out;
    out.reserve(schedule.size());
    double best = floor_value;
    std::size_t k = 0;
    for (auto prefix : schedule) {
        for (; k < prefix && k < terms.size(); ++k) best = std::max(best, terms[k]);
        out.push_back({static_cast<double>(prefix), best});
    }
    return out;
}

bool schedule_uses_checkpoints(std::size_t range, const std::vector<std::size_t>& checkpoints) {
    std::vector<std::size_t> in_range;
    for (auto c : checkpoints)
        if (c >= 4 && c <= range) in_range.push_back(c);
    std::sort(in_range.begin(), in_range.end());
    return std::unique(in_range.begin(), in_range.end()) - in_range.begin() >= 3;
}

std::string schedule_description(const std::vector<std::size_t>& schedule, bool from_checkpoints) {
    std::ostringstream os;
    os << (from_checkpoints ? "checkpoints" : "doubling") << " prefixes [";
    for (std::size_t i = 0; i < schedule.size(); ++i) os << (i ? "," : "") << schedule[i];
    os << "]";
    return os.str();
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double round_sig12(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(format_real(v).c_str(), nullptr);
}

}  // namespace ultraweight
