#include "modalkit/runner.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "modalkit/parser.hpp"
#include "modalkit/printer.hpp"

namespace modalkit {

namespace fs = std::filesystem;

const char* szs_status_name(SzsStatus s) {
  switch (s) {
    case SzsStatus::Theorem: return "Theorem";
    case SzsStatus::CounterSatisfiable: return "CounterSatisfiable";
    case SzsStatus::Unknown: return "Unknown";
    case SzsStatus::Timeout: return "Timeout";
    case SzsStatus::GaveUp: return "GaveUp";
    case SzsStatus::Error: return "Error";
  }
  return "?";
}

SzsStatus parse_szs_status(const std::string& output) {
  size_t pos = output.find("SZS status");
  if (pos == std::string::npos) return SzsStatus::Unknown;
  pos += std::string("SZS status").size();
  while (pos < output.size() && (output[pos] == ' ' || output[pos] == '\t')) pos++;
  size_t end = pos;
  while (end < output.size() && (std::isalnum(static_cast<unsigned char>(output[end])) != 0))
    end++;
  std::string word = output.substr(pos, end - pos);
  if (word == "Theorem") return SzsStatus::Theorem;
  if (word == "CounterSatisfiable") return SzsStatus::CounterSatisfiable;
  if (word == "Timeout" || word == "ResourceOut") return SzsStatus::Timeout;
  if (word == "GaveUp") return SzsStatus::GaveUp;
  if (word == "Error" || word == "InputError" || word == "UsageError") return SzsStatus::Error;
  return SzsStatus::Unknown;
}

BackendResult run_command(const std::string& command, double timeout_seconds) {
  using Clock = std::chrono::steady_clock;
  BackendResult res;

  int fds[2];
  if (pipe(fds) != 0) {
    res.spawn_failed = true;
    return res;
  }

  auto start = Clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    res.spawn_failed = true;
    return res;
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  fcntl(fds[0], F_SETFL, O_NONBLOCK);

  auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(timeout_seconds));
  bool killed = false;
  char buf[4096];
  for (;;) {
    auto now = Clock::now();
    if (!killed && now >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      killed = true;
    }
    int wait_ms = 20;
    if (!killed) {
      auto remain = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      wait_ms = static_cast<int>(std::min<long long>(std::max<long long>(remain, 1), 50));
    }
    struct pollfd pfd{fds[0], POLLIN, 0};
    int pr = poll(&pfd, 1, wait_ms);
    if (pr > 0) {
      ssize_t n;
      while ((n = read(fds[0], buf, sizeof buf)) > 0) res.output.append(buf, static_cast<size_t>(n));
      if (n == 0) break;  // EOF: all writers gone
    }
  }
  close(fds[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  res.timed_out = killed;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (!killed && res.exit_code == 127) res.spawn_failed = true;
  res.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return res;
}

// ---------------------------------------------------------------------------
// Batch driver

namespace {

std::string replace_placeholder(const std::string& tmpl, const std::string& file) {
  std::string out = tmpl;
  const std::string key = "{file}";
  size_t pos = out.find(key);
  if (pos == std::string::npos) return out + " " + file;
  while (pos != std::string::npos) {
    out.replace(pos, key.size(), file);
    pos = out.find(key, pos + file.size());
  }
  return out;
}

std::string system_label(const SchemeSet& schemes) {
  if (const char* tok = system_token_for(schemes)) {
    std::string t = tok;
    return t.substr(std::string("$modal_system_").size());
  }
  std::string out;
  for (AxiomScheme a : schemes) {
    std::string t = axiom_scheme_token(a);
    out += t.substr(std::string("$modal_axiom_").size());
  }
  return out;
}

std::string domains_label(DomainSemantics d) {
  std::string t = domain_semantics_name(d);
  return t.substr(1);
}

int system_rank(const std::string& s) {
  static const std::vector<std::string> order = {"K", "D", "M", "K4", "D4", "B", "S4", "S5"};
  for (size_t i = 0; i < order.size(); i++)
    if (s == order[i]) return static_cast<int>(i);
  return 100;
}

int domains_rank(const std::string& d) {
  static const std::vector<std::string> order = {"constant", "cumulative", "decreasing",
                                                 "varying"};
  for (size_t i = 0; i < order.size(); i++)
    if (d == order[i]) return static_cast<int>(i);
  return 100;
}

bool spec_label_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    size_t dot = s.find('.');
    return std::make_pair(s.substr(0, dot),
                          dot == std::string::npos ? std::string() : s.substr(dot + 1));
  };
  auto [as, ad] = split(a);
  auto [bs, bd] = split(b);
  if (system_rank(as) != system_rank(bs)) return system_rank(as) < system_rank(bs);
  if (as != bs) return as < bs;
  if (domains_rank(ad) != domains_rank(bd)) return domains_rank(ad) < domains_rank(bd);
  return ad < bd;
}

}  // namespace

RunReport run_batch(const RunConfig& config) {
  RunReport report;
  report.backends = config.backends;
  report.timeout_seconds = config.timeout_seconds;

  std::error_code ec;
  fs::path workdir = fs::temp_directory_path(ec) / ("modalkit-run-" + std::to_string(getpid()));
  fs::create_directories(workdir, ec);

  struct Job {
    std::string problem_path;
    std::string spec_label = "unknown";
    std::string thf_path;  // empty when translation failed
  };
  std::vector<Job> jobs(config.problems.size());

  // Phase 1: translate every problem once.
  {
    std::atomic<size_t> next{0};
    auto translate_worker = [&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        Job& job = jobs[i];
        job.problem_path = config.problems[i];
        try {
          ParseOptions popt;
          popt.include_root = config.include_root;
          ParseResult parsed = parse_file(job.problem_path, popt);
          if (!parsed.ok()) continue;  // Error records below
          Problem& problem = *parsed.problem;
          LogicSpec spec;
          if (const LogicSpec* in_file = problem.logic_spec()) spec = *in_file;
          else if (!config.system_override || !config.domains_override) continue;
          if (config.system_override)
            spec.modalities.default_schemes = expand_system(*config.system_override);
          if (config.domains_override) spec.default_domains = *config.domains_override;
          job.spec_label = system_label(spec.modalities.default_schemes) + "." +
                           domains_label(spec.default_domains);
          Problem embedded = embed_problem(problem, spec, config.embed);
          std::string text = print_problem(embedded, PrintStyle::Thf);
          fs::path out = workdir / (fs::path(job.problem_path).filename().string() + "." +
                                    std::to_string(i) + ".thf");
          std::ofstream of(out);
          of << text;
          of.close();
          job.thf_path = out.string();
        } catch (const ToolError&) {
          // leave thf_path empty; all records become Error
        }
      }
    };
    int n = config.workers > 0 ? config.workers
                               : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (int i = 0; i < n; i++) pool.emplace_back(translate_worker);
    for (auto& t : pool) t.join();
  }

  // Phase 2: every (problem, backend) pair exactly once.
  struct Pair {
    size_t job;
    size_t backend;
  };
  std::vector<Pair> pairs;
  for (size_t j = 0; j < jobs.size(); j++)
    for (size_t b = 0; b < config.backends.size(); b++) pairs.push_back({j, b});
  report.records.resize(pairs.size());

  {
    std::atomic<size_t> next{0};
    auto run_worker = [&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= pairs.size()) return;
        const Job& job = jobs[pairs[i].job];
        const std::string& backend = config.backends[pairs[i].backend];
        RunRecord rec;
        rec.problem_id = fs::path(job.problem_path).filename().string();
        rec.spec_label = job.spec_label;
        rec.backend = backend;
        if (job.thf_path.empty()) {
          rec.status = SzsStatus::Error;
        } else {
          BackendResult r = run_command(replace_placeholder(backend, job.thf_path),
                                        config.timeout_seconds);
          rec.wall_seconds = r.wall_seconds;
          if (r.timed_out) rec.status = SzsStatus::Timeout;
          else if (r.spawn_failed) rec.status = SzsStatus::Error;
          else rec.status = parse_szs_status(r.output);
        }
        report.records[i] = std::move(rec);
      }
    };
    int n = config.workers > 0 ? config.workers
                               : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (int i = 0; i < n; i++) pool.emplace_back(run_worker);
    for (auto& t : pool) t.join();
  }

  fs::remove_all(workdir, ec);
  return report;
}

// ---------------------------------------------------------------------------
// Aggregation

std::map<std::string, std::map<std::string, long long>> RunReport::proved_matrix() const {
  std::map<std::string, std::map<std::string, long long>> out;
  for (const auto& r : records) {
    auto& row = out[r.spec_label];
    for (const std::string& b : backends) row.emplace(b, 0);
    if (r.status == SzsStatus::Theorem) row[r.backend]++;
  }
  return out;
}

std::map<std::string, long long> RunReport::union_by_spec() const {
  std::map<std::string, std::set<std::string>> proved;  // spec -> problems
  std::map<std::string, long long> out;
  for (const auto& r : records) {
    out.emplace(r.spec_label, 0);
    if (r.status == SzsStatus::Theorem) proved[r.spec_label].insert(r.problem_id);
  }
  for (const auto& [spec, set] : proved) out[spec] = static_cast<long long>(set.size());
  return out;
}

std::map<std::string, long long> RunReport::intersection_by_spec() const {
  // problem -> backends that proved it
  std::map<std::pair<std::string, std::string>, std::set<std::string>> proved;
  std::map<std::string, long long> out;
  for (const auto& r : records) {
    out.emplace(r.spec_label, 0);
    if (r.status == SzsStatus::Theorem) proved[{r.spec_label, r.problem_id}].insert(r.backend);
  }
  for (const auto& [key, who] : proved)
    if (who.size() == backends.size()) out[key.first]++;
  return out;
}

std::map<std::string, long long> RunReport::unique_by_backend() const {
  std::map<std::string, std::set<std::string>> proved;  // problem -> backends
  for (const auto& r : records)
    if (r.status == SzsStatus::Theorem) proved[r.problem_id + "\t" + r.spec_label].insert(r.backend);
  std::map<std::string, long long> out;
  for (const std::string& b : backends) out[b] = 0;
  for (const auto& [problem, who] : proved) {
    (void)problem;
    if (who.size() == 1) out[*who.begin()]++;
  }
  return out;
}

std::string render_run_report(const RunReport& report) {
  std::ostringstream out;
  out << "# modalkit run report\n";
  out << "# timeout: " << report.timeout_seconds
      << "s wall-clock per (problem, backend) invocation\n";
  for (size_t i = 0; i < report.backends.size(); i++)
    out << "# backend " << i + 1 << ": " << report.backends[i] << "\n";

  auto matrix = report.proved_matrix();
  auto unions = report.union_by_spec();
  auto inters = report.intersection_by_spec();

  std::vector<std::string> specs;
  for (const auto& [spec, row] : matrix) {
    (void)row;
    specs.push_back(spec);
  }
  std::sort(specs.begin(), specs.end(), spec_label_less);

  out << "\n== theorems proved by logic specification ==\n";
  out << "spec";
  for (const auto& b : report.backends) out << "\t" << b;
  out << "\tUnion\tIntersection\n";
  std::map<std::string, long long> totals;
  long long total_union = 0, total_inter = 0;
  for (const auto& spec : specs) {
    out << spec;
    for (const auto& b : report.backends) {
      long long n = matrix[spec][b];
      totals[b] += n;
      out << "\t" << n;
    }
    out << "\t" << unions[spec] << "\t" << inters[spec] << "\n";
    total_union += unions[spec];
    total_inter += inters[spec];
  }
  out << "TOTAL";
  for (const auto& b : report.backends) out << "\t" << totals[b];
  out << "\t" << total_union << "\t" << total_inter << "\n";

  out << "\n== per-system totals ==\n";
  out << "system";
  for (const auto& b : report.backends) out << "\t" << b;
  out << "\tUnion\n";
  std::map<std::string, std::map<std::string, long long>> sys_tot;
  std::map<std::string, long long> sys_union;
  for (const auto& spec : specs) {
    std::string system = spec.substr(0, spec.find('.'));
    for (const auto& b : report.backends) sys_tot[system][b] += matrix[spec][b];
    sys_union[system] += unions[spec];
  }
  std::vector<std::string> systems;
  for (const auto& [s, row] : sys_tot) {
    (void)row;
    systems.push_back(s);
  }
  std::sort(systems.begin(), systems.end(), [](const std::string& a, const std::string& b) {
    if (system_rank(a) != system_rank(b)) return system_rank(a) < system_rank(b);
    return a < b;
  });
  for (const auto& s : systems) {
    out << s;
    for (const auto& b : report.backends) out << "\t" << sys_tot[s][b];
    out << "\t" << sys_union[s] << "\n";
  }

  out << "\n== per-backend summary ==\n";
  out << "backend\tTheorem\tCounterSatisfiable\tTimeout\tGaveUp\tUnknown\tError\tUnique\n";
  auto uniques = report.unique_by_backend();
  for (const auto& b : report.backends) {
    std::map<SzsStatus, long long> counts;
    for (const auto& r : report.records)
      if (r.backend == b) counts[r.status]++;
    out << b << "\t" << counts[SzsStatus::Theorem] << "\t" << counts[SzsStatus::CounterSatisfiable]
        << "\t" << counts[SzsStatus::Timeout] << "\t" << counts[SzsStatus::GaveUp] << "\t"
        << counts[SzsStatus::Unknown] << "\t" << counts[SzsStatus::Error] << "\t" << uniques[b]
        << "\n";
  }

  out << "\n== records ==\n";
  out << "problem\tspec\tbackend\tstatus\twall_s\n";
  for (const auto& r : report.records) {
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.2f", r.wall_seconds);
    out << r.problem_id << "\t" << r.spec_label << "\t" << r.backend << "\t"
        << szs_status_name(r.status) << "\t" << wall << "\n";
  }
  return out.str();
}

}  // namespace modalkit
