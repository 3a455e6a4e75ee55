#pragma once

#include <iosfwd>
#include <string>

#include "censbo/bo_loop.hpp"

namespace censbo {

/// Shortest decimal text that round-trips to the same double ("inf", "-inf",
/// "nan" for non-finite values).
std::string format_real(double value);

/// One JSON object per record with fields iteration, theta, kappa_used, y,
/// censored, cost, cumulative_cost, f_min_after, incumbent_after (null until
/// the first uncensored observation).
void write_trace_jsonl(std::ostream& out, const RunTrace& trace);

/// Inverse of write_trace_jsonl; the final fields are taken from the last
/// record. Throws IoError on malformed input.
RunTrace read_trace_jsonl(std::istream& in);

/// Header: iteration, theta_0..theta_{d-1}, kappa_used, y, censored, cost,
/// cumulative_cost, f_min_after, incumbent_0..incumbent_{d-1}. Missing
/// values are empty cells.
void write_trace_csv(std::ostream& out, const RunTrace& trace, std::size_t dims);

}  // namespace censbo
