#pragma once

// Integer zeros of x^T M x in the box |x| <= R (sup-norm), for a
// row-major machine-integer Gram matrix M.

#include "bqc/arith.hpp"
#include "bqc/errors.hpp"

#include <functional>
#include <span>

namespace bqc {

enum class CountMethod { naive, slice };

const char* to_string(CountMethod method);

using ZeroVisitor = std::function<void(std::span<const i64>)>;

// naive walks all (2R+1)^n points. slice enumerates n-1 coordinates and
// solves the remaining one from the integer discriminant; fibers that are
// not quadratic fall back to linear solving or to the whole range.
i64 count_zeros_box(std::span<const i64> gram, std::size_t n, i64 R, CountMethod method,
                    double budget = kDefaultBudget);

// Calls `visit` once for every zero in the box (slice method).
void for_each_zero_box(std::span<const i64> gram, std::size_t n, i64 R, const ZeroVisitor& visit,
                       double budget = kDefaultBudget);

// Work estimate used against the budget.
double box_work(std::size_t n, i64 R, CountMethod method);

}  // namespace bqc
