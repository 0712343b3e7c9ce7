// Runs the verification battery at the default sizes and prints one
// pass/fail line per acceptance criterion. Exit status 0 iff all pass.
//
//   acceptance [--threads N] [ids...]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <set>
#include <string>

#include "schlafli/battery.hpp"
#include "schlafli/rng.hpp"

using namespace schlafli;

namespace {

double now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void print_failures(const CriterionResult& c) {
  int shown = 0;
  for (const ReportRow& r : c.rows) {
    if (r.pass) continue;
    if (shown++ == 5) {
      std::printf("    ...\n");
      break;
    }
    std::printf("    %s / %s: computed %.12g oracle %.12g residual %.3g tol %.3g\n", r.object.c_str(),
                r.quantity.c_str(), r.computed, r.oracle, r.residual, r.tolerance + r.error_budget);
  }
}

VerificationReport run_battery(const BatteryOptions& options, std::vector<CriterionResult>* results) {
  VerificationReport report;
  for (int id = 1; id <= criterion_count(); ++id) {
    CriterionResult c = run_criterion(id, options);
    report.rows.insert(report.rows.end(), c.rows.begin(), c.rows.end());
    if (results) results->push_back(std::move(c));
  }
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      set_default_threads(std::atoi(argv[++i]));
    } else {
      only.insert(std::atoi(argv[i]));
    }
  }
  const auto selected = [&](int id) { return only.empty() || only.count(id) > 0; };

  const BatteryOptions options;
  int failed = 0;
  const double start = now();
  VerificationReport first;
  for (int id = 1; id <= criterion_count(); ++id) {
    if (!selected(id)) continue;
    const CriterionResult c = run_criterion(id, options);
    first.rows.insert(first.rows.end(), c.rows.begin(), c.rows.end());
    int ok = 0;
    for (const ReportRow& r : c.rows) ok += r.pass;
    bool pass = c.passed();
    std::string extra;
    for (const auto& [name, seconds] : c.timings) {
      if (name.rfind("runtime ", 0) == 0) {
        const bool fast = seconds <= 60.0;
        pass = pass && fast;
        char buf[96];
        std::snprintf(buf, sizeof buf, ", %s %.1fs%s", name.c_str() + 8, seconds, fast ? "" : " > 60s");
        extra += buf;
      }
    }
    std::printf("criterion %2d %-26s %s  (%d/%zu rows, %.1fs%s)\n", id, c.key.c_str(), pass ? "PASS" : "FAIL", ok,
                c.rows.size(), c.timings.at("total"), extra.c_str());
    if (!pass) {
      ++failed;
      print_failures(c);
    }
    std::fflush(stdout);
  }
  const double battery_time = now() - start;

  if (selected(14)) {
    const double t0 = now();
    const VerificationReport second = only.empty() ? run_battery(options, nullptr) : VerificationReport{};
    const double rerun_time = now() - t0;
    bool same = false;
    if (only.empty()) {
      same = first.json() == second.json() && first.csv() == second.csv();
    } else {
      // partial run: compare two runs of a cheap subset
      VerificationReport a, b;
      for (int id : {2, 6, 12}) {
        const CriterionResult ca = run_criterion(id, options), cb = run_criterion(id, options);
        a.rows.insert(a.rows.end(), ca.rows.begin(), ca.rows.end());
        b.rows.insert(b.rows.end(), cb.rows.begin(), cb.rows.end());
      }
      same = a.json() == b.json() && a.csv() == b.csv();
    }
    const double worst = std::max(battery_time, rerun_time);
    const bool fast = !only.empty() || worst <= 600.0;
    const bool pass = same && fast;
    std::printf("criterion 14 %-26s %s  (reports %s, battery %.1fs / %.1fs)\n", "determinism", pass ? "PASS" : "FAIL",
                same ? "byte-identical" : "DIFFER", battery_time, rerun_time);
    if (!pass) ++failed;
  }
  std::printf("%s: %d criteria failed\n", failed ? "FAIL" : "OK", failed);
  return failed ? 1 : 0;
}
