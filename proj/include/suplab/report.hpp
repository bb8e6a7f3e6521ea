#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace suplab {

struct RelationCheck {
    std::string name;
    bool passed = true;
    // rhs - lhs in the relation's natural units; negative means violated.
    double slack = 0.0;
    std::string detail;
};

/// Ordered list of named pass/fail checks. Failures are data, not exceptions.
class RelationReport {
public:
    void add(std::string name, bool passed, double slack, std::string detail = {});

    /// Records `lhs <= rhs` with relative tolerance `rel_tol` on max(|lhs|, |rhs|, 1).
    void add_leq(std::string name, double lhs, double rhs, double rel_tol = 1e-9);

    void merge(const RelationReport& other);

    [[nodiscard]] bool all_passed() const noexcept;
    [[nodiscard]] std::size_t failures() const noexcept;
    [[nodiscard]] std::size_t size() const noexcept { return checks_.size(); }
    [[nodiscard]] const std::vector<RelationCheck>& checks() const noexcept { return checks_; }

    /// Smallest slack among checks with the given name prefix (+inf if none).
    [[nodiscard]] double min_slack(const std::string& prefix = {}) const noexcept;

    [[nodiscard]] std::vector<RelationCheck> failed() const;

private:
    std::vector<RelationCheck> checks_;
};

}  // namespace suplab
