#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace schlafli {

/// One verification result. pass <=> |residual| <= tolerance + error_budget.
/// For one-sided checks `residual` is the amount by which the bound is
/// violated (0 when it holds).
struct ReportRow {
  std::string task, object, quantity;
  double computed = 0.0, oracle = 0.0, residual = 0.0, tolerance = 0.0, error_budget = 0.0;
  bool pass = false;
  std::optional<std::uint64_t> seed;
  double wall_time = 0.0;  // seconds; kept out of the byte-stable report
};

/// Two-sided row: residual = computed - oracle.
ReportRow value_row(std::string object, std::string quantity, double computed, double oracle, double tolerance,
                    double error_budget = 0.0, std::optional<std::uint64_t> seed = std::nullopt);
/// computed >= bound - tolerance.
ReportRow lower_bound_row(std::string object, std::string quantity, double computed, double bound,
                          double tolerance = 0.0, std::optional<std::uint64_t> seed = std::nullopt);
/// computed <= bound + tolerance.
ReportRow upper_bound_row(std::string object, std::string quantity, double computed, double bound,
                          double tolerance = 0.0, std::optional<std::uint64_t> seed = std::nullopt);
/// A failing row carrying an error message in `quantity`.
ReportRow error_row(std::string object, const std::string& what);

struct VerificationReport {
  std::vector<ReportRow> rows;

  bool passed() const;
  /// {"schema": 1, "passed": ..., "rows": [...]}; no timing data.
  std::string json() const;
  /// Fixed columns, 17 significant digits; no timing data.
  std::string csv() const;
  /// task,object,quantity,wall_time
  std::string timing_csv() const;
};

/// The CSV header of VerificationReport::csv.
extern const char* const kReportColumns;

/// Sizes and seeds of the verification battery. Defaults follow the
/// acceptance criteria.
struct BatteryOptions {
  std::uint64_t seed = 20240917;
  int tetra_paths = 20;
  int euclidean_deformations = 50;
  int random_families = 10;
  int flex_steps = 50;
  double flex_step = 0.01;
  long flex_volume_samples = 400000;
  int diagonal_trials = 100;
  long crofton_samples = 1000000;
  long steiner_samples = 40000;
  long tube_samples = 40000;
  int umbilic_points = 1000;
  int random_programs = 1000;
  int fuzz_inputs = 20000;
  double mc_sigmas = 4.0;

  /// Every sample and trial count multiplied by `factor` (at least 1).
  BatteryOptions scaled(double factor) const;
};

struct CriterionResult {
  int id = 0;
  std::string key;
  std::vector<ReportRow> rows;
  /// Wall-clock limits checked outside the report (seconds).
  std::map<std::string, double> timings;
  bool passed() const;
};

/// Criteria 1 to 13, in order.
int criterion_count();
std::string criterion_key(int id);
CriterionResult run_criterion(int id, const BatteryOptions& options);

}  // namespace schlafli
