#include "mmwsim/metrics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mmwsim {

void KahanSum::add(double x) {
  const double y = x - comp_;
  const double t = sum_ + y;
  comp_ = (t - sum_) - y;
  sum_ = t;
}

namespace {

struct MeanCi {
  double mean = 0.0;
  double ci = 0.0;
};

MeanCi mean_ci(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  KahanSum sum;
  for (double x : xs) sum.add(x);
  MeanCi out;
  out.mean = sum.value() / static_cast<double>(n);
  if (n < 2) return out;  // single trace: CI half-width 0 by convention
  KahanSum var;
  for (double x : xs) var.add((x - out.mean) * (x - out.mean));
  const double sd = std::sqrt(var.value() / static_cast<double>(n - 1));
  out.ci = 1.96 * sd / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace

RunSummary summarize(std::span<const std::vector<SlotRecord>> traces, double gamma_thr) {
  if (traces.empty()) throw std::invalid_argument("summarize: no traces");
  const std::size_t m = traces.front().size();
  std::vector<double> agg, unmet, handover, fallback;
  for (const auto& trace : traces) {
    if (trace.size() != m) throw std::invalid_argument("summarize: mismatched trace lengths");
    KahanSum gamma;
    int u = 0, h = 0, f = 0;
    for (const SlotRecord& r : trace) {
      gamma.add(r.outcome.throughput);
      if (r.outcome.throughput <= gamma_thr) ++u;
      if (r.outcome.handover_executed || r.outcome.reactive_fallback) ++h;
      if (r.outcome.reactive_fallback) ++f;
    }
    agg.push_back(gamma.value());
    unmet.push_back(u);
    handover.push_back(h);
    fallback.push_back(f);
  }

  RunSummary s;
  s.realizations = static_cast<int>(traces.size());
  s.slots = static_cast<int>(m);
  const MeanCi a = mean_ci(agg), u = mean_ci(unmet), h = mean_ci(handover), f = mean_ci(fallback);
  s.aggregate_throughput_mean = a.mean;
  s.aggregate_throughput_ci = a.ci;
  s.unmet_mean = u.mean;
  s.unmet_ci = u.ci;
  s.handover_mean = h.mean;
  s.handover_ci = h.ci;
  s.fallback_mean = f.mean;
  s.fallback_ci = f.ci;
  return s;
}

std::vector<ComparisonRow> compare(std::span<const MethodSummary> summaries) {
  if (summaries.empty()) throw std::invalid_argument("compare: no summaries");
  const int m = summaries.front().summary.slots;
  std::vector<ComparisonRow> rows;
  for (const MethodSummary& ms : summaries) {
    if (ms.summary.slots != m) throw std::invalid_argument("compare: mismatched slot counts");
    ComparisonRow row;
    row.method = ms.method;
    row.summary = ms.summary;
    const RunSummary& ref = summaries.front().summary;
    row.d_throughput = ms.summary.aggregate_throughput_mean - ref.aggregate_throughput_mean;
    row.d_unmet = ms.summary.unmet_mean - ref.unmet_mean;
    row.d_handover = ms.summary.handover_mean - ref.handover_mean;
    rows.push_back(row);
  }
  return rows;
}

void write_summary_json(const RunSummary& s, const std::string& method, const std::string& path) {
  nlohmann::json j;
  j["method"] = method;
  j["realizations"] = s.realizations;
  j["slots"] = s.slots;
  j["aggregate_throughput_mean"] = s.aggregate_throughput_mean;
  j["aggregate_throughput_ci"] = s.aggregate_throughput_ci;
  j["unmet_mean"] = s.unmet_mean;
  j["unmet_ci"] = s.unmet_ci;
  j["handover_mean"] = s.handover_mean;
  j["handover_ci"] = s.handover_ci;
  j["fallback_mean"] = s.fallback_mean;
  j["fallback_ci"] = s.fallback_ci;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary: " + path);
  out << j.dump(2) << "\n";
}

void write_comparison_csv(std::span<const ComparisonRow> rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write comparison: " + path);
  out << "method,realizations,slots,throughput_mean,throughput_ci,unmet_mean,unmet_ci,"
         "handover_mean,handover_ci,fallback_mean,fallback_ci,"
         "d_throughput,d_unmet,d_handover\n";
  char line[512];
  for (const ComparisonRow& r : rows) {
    const RunSummary& s = r.summary;
    std::snprintf(line, sizeof(line),
                  "%s,%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  r.method.c_str(), s.realizations, s.slots, s.aggregate_throughput_mean,
                  s.aggregate_throughput_ci, s.unmet_mean, s.unmet_ci, s.handover_mean,
                  s.handover_ci, s.fallback_mean, s.fallback_ci, r.d_throughput, r.d_unmet,
                  r.d_handover);
    out << line;
  }
}

double sign_test_p_value(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sign_test: length mismatch");
  int n = 0, wins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    ++n;
    if (a[i] < b[i]) ++wins;
  }
  if (n == 0) return 1.0;
  // P(X >= wins) for X ~ Binomial(n, 1/2), via log factorials.
  std::vector<double> logfact(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 1; i <= n; ++i)
    logfact[static_cast<std::size_t>(i)] = logfact[static_cast<std::size_t>(i - 1)] + std::log(i);
  double p = 0.0;
  for (int k = wins; k <= n; ++k) {
    const double log_c = logfact[static_cast<std::size_t>(n)] -
                         logfact[static_cast<std::size_t>(k)] -
                         logfact[static_cast<std::size_t>(n - k)];
    p += std::exp(log_c - n * std::log(2.0));
  }
  return std::min(1.0, p);
}

}  // namespace mmwsim
