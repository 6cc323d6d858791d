#pragma once

#include <stdexcept>
#include <string>

namespace og {

// Malformed file contents (bad magic, version, truncated payload, ...).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Grid dimensions that cannot be represented or allocated.
class SizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two inputs that must share a GridMeta (or image size) do not.
class DimensionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Rejection sampling exhausted its attempt budget.
class PlacementFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace og
