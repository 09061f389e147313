#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pensplit/solvers.hpp"

namespace pensplit {

class TraceIoError : public std::runtime_error {
public:
  explicit TraceIoError(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// CSV serialization with the fixed header
/// n,lambda,beta,step_displacement,penalty_residual,fbf_gap,oracle_error_x,oracle_error_z
/// Absent optional fields are empty; rows ascend in n; LF line endings.
std::string format_trace(const std::vector<IterationRecord>& records);

/// Parses text produced by format_trace. Throws TraceIoError on a
/// malformed document; format_trace(parse_trace(t)) == t.
std::vector<IterationRecord> parse_trace(const std::string& text);

/// Atomic write (temp file + rename). Throws TraceIoError on I/O failure.
void write_trace(const std::vector<IterationRecord>& records, const std::string& path);

std::vector<IterationRecord> read_trace(const std::string& path);

/// Atomic write of an arbitrary text document (used for the run summary).
void write_text_file(const std::string& text, const std::string& path);

}  // namespace pensplit
