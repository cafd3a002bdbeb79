// modalkit :: external prover bridge and SZS result tabulation

#ifndef MODALKIT_RUNNER_HPP_
#define MODALKIT_RUNNER_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modalkit/embedding.hpp"
#include "modalkit/logic_spec.hpp"

namespace modalkit {

enum class SzsStatus { Theorem, CounterSatisfiable, Unknown, Timeout, GaveUp, Error };

const char* szs_status_name(SzsStatus s);

// Parses the first `SZS status <word>` line; anything absent or
// unrecognized is Unknown.
SzsStatus parse_szs_status(const std::string& output);

struct RunRecord {
  std::string problem_id;
  std::string spec_label;  // "<system>.<domains>", e.g. "S5.constant"
  std::string backend;
  SzsStatus status = SzsStatus::Unknown;
  double wall_seconds = 0.0;
};

struct BackendResult {
  bool spawn_failed = false;
  bool timed_out = false;
  int exit_code = 0;
  std::string output;
  double wall_seconds = 0.0;
};

// Runs a shell command with a wall-clock timeout; stdout and stderr are
// captured. The whole process group is killed on timeout.
BackendResult run_command(const std::string& command, double timeout_seconds);

struct RunConfig {
  std::vector<std::string> problems;  // NXF problem files carrying logic specs
  std::vector<std::string> backends;  // command templates with a {file} placeholder
  double timeout_seconds = 60.0;
  int workers = 0;  // 0 = hardware concurrency
  std::string include_root;
  EmbedOptions embed;
  // optional overrides applied to every problem
  std::optional<std::string> system_override;
  std::optional<DomainSemantics> domains_override;
};

struct RunReport {
  std::vector<RunRecord> records;
  std::vector<std::string> backends;
  double timeout_seconds = 0.0;

  // Problems proved (SZS Theorem) per spec label and backend.
  std::map<std::string, std::map<std::string, long long>> proved_matrix() const;
  std::map<std::string, long long> union_by_spec() const;
  std::map<std::string, long long> intersection_by_spec() const;
  std::map<std::string, long long> unique_by_backend() const;
};

// Translates each problem, invokes every backend on the result under the
// timeout, and collects one record per (problem, backend) pair. Backend
// failures become status Error; the batch never aborts.
RunReport run_batch(const RunConfig& config);

// Rendered report: header, spec-label matrix with Union/Intersection,
// per-system totals, per-backend summary with Unique counts, and the raw
// TSV records.
std::string render_run_report(const RunReport& report);

}  // namespace modalkit

#endif  // MODALKIT_RUNNER_HPP_
