#include "pensplit/trace.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pensplit {

namespace {
constexpr const char* kHeader =
    "n,lambda,beta,step_displacement,penalty_residual,fbf_gap,oracle_error_x,"
    "oracle_error_z";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double_field(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw TraceIoError("trace: malformed number '" + s + "' on line " +
                       std::to_string(line_no));
  }
  return v;
}
}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw TraceIoError("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string format_trace(const std::vector<IterationRecord>& records) {
  std::string out = kHeader;
  out += '\n';
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const IterationRecord& r : records) {
    out += std::to_string(r.n);
    out += ',';
    out += format_double(r.lambda);
    out += ',';
    out += format_double(r.beta);
    out += ',';
    out += format_double(r.step_displacement);
    out += ',';
    out += format_double(r.penalty_residual);
    out += ',';
    out += opt(r.fbf_gap);
    out += ',';
    out += opt(r.oracle_error_x);
    out += ',';
    out += opt(r.oracle_error_z);
    out += '\n';
  }
  return out;
}

std::vector<IterationRecord> parse_trace(const std::string& text) {
  if (text.empty() || text.back() != '\n') {
    throw TraceIoError("trace: document must end with a newline");
  }
  if (text.find('\r') != std::string::npos) {
    throw TraceIoError("trace: CR line endings are not accepted");
  }
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      const std::size_t pos = text.find('\n', start);
      lines.push_back(text.substr(start, pos - start));
      start = pos + 1;
    }
  }
  if (lines.empty() || lines[0] != kHeader) {
    throw TraceIoError("trace: missing or wrong header");
  }
  std::vector<IterationRecord> records;
  long last_n = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != 8) {
      throw TraceIoError("trace: expected 8 fields on line " + std::to_string(i + 1));
    }
    IterationRecord r;
    r.n = static_cast<long>(parse_double_field(f[0], i + 1));
    if (r.n <= last_n) throw TraceIoError("trace: rows must ascend in n");
    last_n = r.n;
    r.lambda = parse_double_field(f[1], i + 1);
    r.beta = parse_double_field(f[2], i + 1);
    r.step_displacement = parse_double_field(f[3], i + 1);
    r.penalty_residual = parse_double_field(f[4], i + 1);
    if (!f[5].empty()) r.fbf_gap = parse_double_field(f[5], i + 1);
    if (!f[6].empty()) r.oracle_error_x = parse_double_field(f[6], i + 1);
    if (!f[7].empty()) r.oracle_error_z = parse_double_field(f[7], i + 1);
    records.push_back(r);
  }
  return records;
}

void write_text_file(const std::string& text, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw TraceIoError("cannot open '" + tmp + "' for writing");
    os << text;
    os.flush();
    if (!os) throw TraceIoError("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw TraceIoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

void write_trace(const std::vector<IterationRecord>& records, const std::string& path) {
  write_text_file(format_trace(records), path);
}

std::vector<IterationRecord> read_trace(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TraceIoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_trace(ss.str());
}

}  // namespace pensplit
