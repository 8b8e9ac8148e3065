#pragma once

#include <stdexcept>
#include <string>

namespace bqc {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularForm : Error {
    using Error::Error;
};

struct NotOnHypersurface : Error {
    using Error::Error;
};

// A computation would exceed its configured work budget.
struct BudgetExceeded : Error {
    BudgetExceeded(const std::string& what, double work, double budget)
        : Error(what + ": work " + std::to_string(work) + " exceeds budget " +
                std::to_string(budget)),
          work(work), budget(budget) {}
    double work;
    double budget;
};

// Local density did not stabilize before r_max.
struct NotStabilized : Error {
    using Error::Error;
};

// Monte Carlo delta schedule did not converge.
struct NonConvergent : Error {
    using Error::Error;
};

// Malformed form file or experiment config.
struct SchemaError : Error {
    using Error::Error;
};

constexpr double kDefaultBudget = 1e8;

}  // namespace bqc
