#pragma once

#include <stdexcept>
#include <string>

namespace latthiggs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degree or modulus mismatch between cells, forms and chains.
struct DegreeError : Error {
    using Error::Error;
};

// Enumeration would exceed the configured configuration budget.
struct BudgetError : Error {
    using Error::Error;
};

// Parameters lie outside the range where a series or bound is valid.
struct RegimeError : Error {
    using Error::Error;
};

// Requested group, dimension or method is not implemented.
struct UnsupportedError : Error {
    using Error::Error;
};

}  // namespace latthiggs
