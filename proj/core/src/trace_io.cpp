#include "censbo/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "censbo/error.hpp"

namespace censbo {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_trace_jsonl(std::ostream& out, const RunTrace& trace) {
  for (const auto& r : trace.records) {
    nlohmann::ordered_json j;
    j["iteration"] = r.iteration;
    j["theta"] = r.theta;
    j["kappa_used"] = r.kappa_used;
    j["y"] = r.y;
    j["censored"] = r.censored;
    j["cost"] = r.cost;
    j["cumulative_cost"] = r.cumulative_cost;
    j["f_min_after"] = r.f_min_after ? nlohmann::ordered_json(*r.f_min_after) : nullptr;
    j["incumbent_after"] =
        r.incumbent_after ? nlohmann::ordered_json(*r.incumbent_after) : nullptr;
    out << j.dump() << '\n';
  }
}

RunTrace read_trace_jsonl(std::istream& in) {
  RunTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TraceRecord r;
      r.iteration = j.at("iteration").get<std::size_t>();
      r.theta = j.at("theta").get<Configuration>();
      r.kappa_used = j.at("kappa_used").get<double>();
      r.y = j.at("y").get<double>();
      r.censored = j.at("censored").get<bool>();
      r.cost = j.at("cost").get<double>();
      r.cumulative_cost = j.at("cumulative_cost").get<double>();
      if (!j.at("f_min_after").is_null()) r.f_min_after = j.at("f_min_after").get<double>();
      if (!j.at("incumbent_after").is_null()) {
        r.incumbent_after = j.at("incumbent_after").get<Configuration>();
      }
      trace.records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!trace.records.empty()) {
    trace.final_f_min = trace.records.back().f_min_after;
    trace.final_incumbent = trace.records.back().incumbent_after;
  }
  trace.complete = trace.final_f_min.has_value();
  return trace;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace, std::size_t dims) {
  out << "iteration";
  for (std::size_t k = 0; k < dims; ++k) out << ",theta_" << k;
  out << ",kappa_used,y,censored,cost,cumulative_cost,f_min_after";
  for (std::size_t k = 0; k < dims; ++k) out << ",incumbent_" << k;
  out << '\n';
  for (const auto& r : trace.records) {
    if (r.theta.size() != dims) throw DomainError("write_trace_csv: dimension mismatch");
    out << r.iteration;
    for (double v : r.theta) out << ',' << format_real(v);
    out << ',' << format_real(r.kappa_used) << ',' << format_real(r.y) << ','
        << (r.censored ? 1 : 0) << ',' << format_real(r.cost) << ','
        << format_real(r.cumulative_cost) << ',';
    if (r.f_min_after) out << format_real(*r.f_min_after);
    for (std::size_t k = 0; k < dims; ++k) {
      out << ',';
      if (r.incumbent_after) out << format_real((*r.incumbent_after)[k]);
    }
    out << '\n';
  }
}

}  // namespace censbo
