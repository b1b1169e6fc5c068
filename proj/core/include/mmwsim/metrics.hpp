#pragma once

#include <span>
#include <string>
#include <vector>

#include "mmwsim/env.hpp"

namespace mmwsim {

// Compensated (Kahan) summation; keeps aggregate throughput reproducible
// across accumulation orders.
class KahanSum {
 public:
  void add(double x);
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct RunSummary {
  int realizations = 0;
  int slots = 0;  // M, identical across traces
  double aggregate_throughput_mean = 0.0;  // mean over traces of sum_i Gamma_i
  double aggregate_throughput_ci = 0.0;    // 95% half-width
  double unmet_mean = 0.0;  // slots with Gamma <= Gamma_thr
  double unmet_ci = 0.0;
  double handover_mean = 0.0;  // handover_executed or reactive_fallback
  double handover_ci = 0.0;
  double fallback_mean = 0.0;
  double fallback_ci = 0.0;
};

// Aggregates episode traces; throws std::invalid_argument on an empty list or
// mismatched trace lengths. gamma_thr is the throughput threshold the unmet
// count is taken against.
RunSummary summarize(std::span<const std::vector<SlotRecord>> traces, double gamma_thr);

struct MethodSummary {
  std::string method;
  RunSummary summary;
};

struct ComparisonRow {
  std::string method;
  RunSummary summary;
  // Deltas vs. the first ("proposed") entry.
  double d_throughput = 0.0;
  double d_unmet = 0.0;
  double d_handover = 0.0;
};

// First entry is the reference method. Throws on mismatched slot counts.
std::vector<ComparisonRow> compare(std::span<const MethodSummary> summaries);

void write_summary_json(const RunSummary& summary, const std::string& method,
                        const std::string& path);
void write_comparison_csv(std::span<const ComparisonRow> rows, const std::string& path);

// One-sided paired sign test: p-value for "a < b more often than chance"
// over paired observations (ties dropped).
double sign_test_p_value(std::span<const double> a, std::span<const double> b);

}  // namespace mmwsim
