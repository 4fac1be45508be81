#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "choreo/runtime.hpp"
#include "harness/examples.hpp"

namespace harness {

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
  double limit_seconds = 0;
};

struct ConformanceOptions {
  /// Path of the CLI binary; the TCP criterion spawns it. Empty skips TCP.
  std::string cli_path;
  std::vector<std::size_t> gmw_parties{2, 3};
  int gmw_seeds = 5;
  int gmw_max_depth = 3;
  int lottery_runs = 100;
  int deadlock_seeds = 50;
  int equivalence_seeds = 20;
};

/// Runs acceptance suites. Every simulated report produced along the way is
/// also checked for multiply-located-value agreement; `agreement()` reports
/// the accumulated result.
class Conformance {
 public:
  explicit Conformance(ConformanceOptions options) : options_(std::move(options)) {}

  CriterionResult message_economy();
  CriterionResult error_path();
  CriterionResult census_polymorphism();
  CriterionResult gmw_exhaustive();
  CriterionResult ot2_truth_table();
  CriterionResult lottery();
  CriterionResult deadlock_freedom();
  CriterionResult projection_equivalence();
  CriterionResult tcp_interchangeability();
  CriterionResult agreement();

  /// The broken choreography alone; passes when the simulator flags it.
  CriterionResult negative_control();

  /// Suite names accepted by `run`, in execution order.
  static const std::vector<std::string>& suite_names();
  /// Runs one named suite, or every suite for "all".
  std::vector<CriterionResult> run(const std::string& suite);

  /// Example configurations exercised by the deadlock and equivalence suites.
  static std::vector<RunConfig> example_configs();

 private:
  CriterionResult timed(const std::string& name, double limit, const std::function<std::string(bool&)>& body);
  choreo::RunReport simulate(const choreo::AnyChoreography& c, std::uint64_t seed, std::uint64_t budget = 10000);

  ConformanceOptions options_;
  std::size_t agreement_records_ = 0;
  std::size_t agreement_reports_ = 0;
  std::vector<std::string> agreement_violations_;
};

}  // namespace harness
