#include "suplab/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace suplab {

void RelationReport::add(std::string name, bool passed, double slack, std::string detail) {
    checks_.push_back({std::move(name), passed, slack, std::move(detail)});
}

void RelationReport::add_leq(std::string name, double lhs, double rhs, double rel_tol) {
    double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
    if (std::isinf(lhs) || std::isinf(rhs)) scale = 1.0;
    const double slack = rhs - lhs;
    const bool ok = lhs <= rhs || slack >= -rel_tol * scale;
    add(std::move(name), ok, slack);
}

void RelationReport::merge(const RelationReport& other) {
    checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
}

bool RelationReport::all_passed() const noexcept {
    return std::all_of(checks_.begin(), checks_.end(), [](const auto& c) { return c.passed; });
}

std::size_t RelationReport::failures() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(checks_.begin(), checks_.end(), [](const auto& c) { return !c.passed; }));
}

double RelationReport::min_slack(const std::string& prefix) const noexcept {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : checks_) {
        if (c.name.compare(0, prefix.size(), prefix) == 0) best = std::min(best, c.slack);
    }
    return best;
}

std::vector<RelationCheck> RelationReport::failed() const {
    std::vector<RelationCheck> out;
    std::copy_if(checks_.begin(), checks_.end(), std::back_inserter(out),
                 [](const auto& c) { return !c.passed; });
    return out;
}

}  // namespace suplab
