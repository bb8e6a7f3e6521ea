#pragma once

#include <stdexcept>
#include <string>

namespace suplab {

/// Mismatched grids, wrong component counts, malformed fields.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation was called outside its stated domain (e.g. s >= p^- in the
/// power identity).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A user-supplied object broke its declared contract (negative density,
/// failed hypothesis probe).
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace suplab
