/*
Copyright (c) 2026 the lemmaforge contributors. All rights reserved.
Released under Apache 2.0 license as described in the file LICENSE.
*/
#include "lemmaforge/repl_bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <set>

#include <nlohmann/json.hpp>

namespace lemmaforge {

using nlohmann::json;

const char* to_string(VerifyStatus status) {
  switch (status) {
    case VerifyStatus::Proved: return "proved";
    case VerifyStatus::Failed: return "failed";
    case VerifyStatus::Incomplete: return "incomplete";
    case VerifyStatus::Timeout: return "timeout";
    case VerifyStatus::Crashed: return "crashed";
  }
  return "unknown";
}

const char* to_string(Severity severity) {
  switch (severity) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "unknown";
}

ProofState parse_goal_state(const std::string& pretty) {
  ProofState state;
  std::vector<std::string> lines = util::split_lines(pretty);
  bool past_turnstile = false;
  std::string goal;
  bool first_block = true;
  auto flush_goal = [&] {
    if (!goal.empty()) {
      state.goals.push_back(util::collapse_ws(goal));
      goal.clear();
    }
  };
  for (const auto& raw : lines) {
    std::string_view line = util::rtrim(raw);
    if (util::trim(line).empty()) {
      // Blank line separates goal blocks; only the first block's hypotheses
      // are retained (contexts may differ between goals).
      flush_goal();
      past_turnstile = false;
      first_block = false;
      continue;
    }
    if (line.substr(0, 3) == "⊢") {  // ⊢
      flush_goal();
      goal = std::string(util::trim(line.substr(3)));
      past_turnstile = true;
      continue;
    }
    if (past_turnstile) {
      goal += ' ';
      goal += util::trim(line);
      continue;
    }
    if (util::starts_with_word(line, "case")) continue;
    size_t colon = line.find(" : ");
    if (colon == std::string::npos) {
      // Continuation of the previous hypothesis type.
      if (first_block && !state.hypotheses.empty()) {
        state.hypotheses.back().second += ' ';
        state.hypotheses.back().second = util::collapse_ws(
            state.hypotheses.back().second + std::string(util::trim(line)));
      }
      continue;
    }
    if (!first_block) continue;
    std::string names(util::trim(line.substr(0, colon)));
    std::string type = util::collapse_ws(line.substr(colon + 3));
    size_t pos = 0;
    while (pos < names.size()) {
      size_t sp = names.find(' ', pos);
      std::string name = sp == std::string::npos ? names.substr(pos) : names.substr(pos, sp - pos);
      if (!name.empty()) state.hypotheses.emplace_back(name, type);
      if (sp == std::string::npos) break;
      pos = sp + 1;
    }
  }
  flush_goal();
  return state;
}

std::string summarize_errors(const VerificationResult& result, size_t byte_budget) {
  std::set<std::tuple<int, int, std::string>> seen;
  for (const auto& d : result.messages) {
    if (d.severity != Severity::Error) continue;
    std::string text = d.text;
    for (auto& c : text) {
      if (c == '\n') c = ' ';
    }
    seen.emplace(d.line, d.column, util::collapse_ws(text));
  }
  static const std::string kMarker = "... [digest truncated]";
  std::string out;
  for (const auto& [line, col, text] : seen) {
    std::string entry = "line " + std::to_string(line) + ", col " + std::to_string(col) +
                        ": " + text + "\n";
    if (out.size() + entry.size() > byte_budget) {
      while (out.size() + kMarker.size() + 1 > byte_budget && !out.empty()) out.pop_back();
      out += kMarker;
      out += '\n';
      if (out.size() > byte_budget) out.resize(byte_budget);  // degenerate budgets
      break;
    }
    out += entry;
  }
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

namespace {

struct SplitSource {
  std::string imports;  // leading import lines (joined), possibly empty
  std::string body;     // everything after the import block
  int line_offset = 0;  // lines removed from the front
};

SplitSource split_imports(const std::string& source) {
  SplitSource out;
  std::vector<std::string> lines = util::split_lines(source);
  size_t i = 0;
  std::vector<std::string> header;
  while (i < lines.size()) {
    std::string_view t = util::trim(lines[i]);
    if (t.substr(0, 7) == "import " || t == "import") {
      header.push_back(lines[i]);
      ++i;
    } else if (t.empty() && i + 1 < lines.size() &&
               util::trim(lines[i + 1]).substr(0, 7) == "import ") {
      ++i;  // blank line between imports
    } else {
      break;
    }
  }
  out.line_offset = static_cast<int>(i);
  for (const auto& l : header) {
    if (!out.imports.empty()) out.imports += '\n';
    out.imports += l;
  }
  std::vector<std::string> rest(lines.begin() + static_cast<long>(i), lines.end());
  out.body = util::join_lines(rest);
  return out;
}

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

// One external REPL process plus its env cache. Not thread-safe; owned by a
// single pool thread.
class ReplPool::Worker {
 public:
  explicit Worker(const PoolConfig& config) : config_(config) {}
  ~Worker() { stop(); }

  VerificationResult process(const OracleRequest& request) {
    VerificationResult result;
    double started = now_s();
    for (int attempt = 0; attempt < 2; ++attempt) {
      if (!alive_ || served_ >= config_.recycle_after_requests ||
          (request.memory_cap_mb > 0 && request.memory_cap_mb != current_cap_mb_)) {
        restart(request.memory_cap_mb);
      }
      bool crashed = false;
      result = run_once(request, crashed);
      if (!crashed) {
        result.wall_time_s = now_s() - started;
        return result;
      }
      restart(request.memory_cap_mb);
    }
    result.status = VerifyStatus::Crashed;
    result.messages.push_back(
        {Severity::Error, 1, 0, "verification worker crashed twice on this request"});
    result.wall_time_s = now_s() - started;
    return result;
  }

  void stop() {
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      int status = 0;
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
    close_fd(to_child_);
    close_fd(from_child_);
    alive_ = false;
    env_cache_.clear();
  }

 private:
  const PoolConfig& config_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool alive_ = false;
  int served_ = 0;
  int current_cap_mb_ = 0;
  std::map<std::string, long> env_cache_;
  std::string read_buffer_;

  static void close_fd(int& fd) {
    if (fd >= 0) {
      ::close(fd);
      fd = -1;
    }
  }

  void restart(int memory_cap_mb) {
    stop();
    spawn(memory_cap_mb);
  }

  void spawn(int memory_cap_mb) {
    if (config_.repl_path.empty()) {
      throw ToolchainError("no REPL executable configured (set repl_path or LEMMAFORGE_REPL)");
    }
    // O_CLOEXEC must be set atomically: another pool thread may fork between
    // pipe() and a later fcntl(), and a child inheriting these ends would
    // mask EOF and break crash/exec-failure detection. dup2 in the child
    // clears the flag on the stdio copies.
    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0 ||
        pipe2(err_pipe, O_CLOEXEC) != 0) {
      throw ToolchainError("pipe2() failed: " + std::string(std::strerror(errno)));
    }
    pid_t pid = fork();
    if (pid < 0) throw ToolchainError("fork() failed");
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      ::close(in_pipe[0]);
      ::close(in_pipe[1]);
      ::close(out_pipe[0]);
      ::close(out_pipe[1]);
      ::close(err_pipe[0]);
      if (!config_.project_root.empty()) {
        if (chdir(config_.project_root.c_str()) != 0) {
          int err = errno;
          ssize_t n = write(err_pipe[1], &err, sizeof(err));
          (void)n;
          _exit(127);
        }
      }
      if (memory_cap_mb > 0) {
        rlimit lim{};
        lim.rlim_cur = lim.rlim_max = static_cast<rlim_t>(memory_cap_mb) * 1024 * 1024;
        setrlimit(RLIMIT_AS, &lim);
      }
      execl(config_.repl_path.c_str(), config_.repl_path.c_str(), nullptr);
      int err = errno;
      ssize_t n = write(err_pipe[1], &err, sizeof(err));
      (void)n;
      _exit(127);
    }
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    int exec_err = 0;
    ssize_t n = read(err_pipe[0], &exec_err, sizeof(exec_err));
    ::close(err_pipe[0]);
    if (n > 0) {
      int status = 0;
      waitpid(pid, &status, 0);
      throw ToolchainError("cannot start REPL '" + config_.repl_path +
                           "': " + std::strerror(exec_err));
    }
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    alive_ = true;
    served_ = 0;
    current_cap_mb_ = memory_cap_mb;
    env_cache_.clear();
    read_buffer_.clear();
  }

  bool send_line(const std::string& line, double deadline) {
    std::string payload = line + "\n";
    size_t off = 0;
    while (off < payload.size()) {
      double remaining = deadline - now_s();
      if (remaining <= 0) return false;
      pollfd pfd{to_child_, POLLOUT, 0};
      int pr = poll(&pfd, 1, static_cast<int>(remaining * 1000) + 1);
      if (pr < 0 && errno == EINTR) continue;
      if (pr <= 0) return false;
      ssize_t n = write(to_child_, payload.data() + off, payload.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      off += static_cast<size_t>(n);
    }
    return true;
  }

  // Reads one newline-terminated response. Returns false on timeout (deadline
  // passed) or crash (EOF); `timed_out` distinguishes the two.
  bool read_line(std::string& out, double deadline, bool& timed_out) {
    timed_out = false;
    for (;;) {
      size_t nl = read_buffer_.find('\n');
      if (nl != std::string::npos) {
        out = read_buffer_.substr(0, nl);
        read_buffer_.erase(0, nl + 1);
        return true;
      }
      double remaining = deadline - now_s();
      if (remaining <= 0) {
        timed_out = true;
        return false;
      }
      pollfd pfd{from_child_, POLLIN, 0};
      int pr = poll(&pfd, 1, static_cast<int>(remaining * 1000) + 1);
      if (pr < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      if (pr == 0) {
        timed_out = true;
        return false;
      }
      char chunk[65536];
      ssize_t n = read(from_child_, chunk, sizeof(chunk));
      if (n <= 0) return false;  // EOF: worker crashed
      read_buffer_.append(chunk, static_cast<size_t>(n));
    }
  }

  // Runs one request against the live child. On protocol failure sets
  // `crashed`; on timeout kills the child and reports Timeout directly.
  VerificationResult run_once(const OracleRequest& request, bool& crashed) {
    VerificationResult result;
    crashed = false;
    double timeout = request.timeout_s > 0 ? request.timeout_s : config_.default_timeout_s;
    double deadline = now_s() + timeout;

    SplitSource split = split_imports(request.source_text);
    std::string header = split.imports.empty() ? config_.base_imports : split.imports;

    long env_id = -1;
    if (!header.empty()) {
      auto it = env_cache_.find(header);
      if (it != env_cache_.end()) {
        env_id = it->second;
      } else {
        json req{{"cmd", header}};
        json resp;
        if (!exchange(req, resp, deadline, result, crashed)) return result;
        if (resp.contains("env")) env_id = resp["env"].get<long>();
        if (has_errors(resp)) {
          collect_messages(resp, 0, result);
          result.status = VerifyStatus::Failed;
          ++served_;
          return result;
        }
        env_cache_[header] = env_id;
      }
    }

    json req{{"cmd", split.body}};
    if (env_id >= 0) req["env"] = env_id;
    json resp;
    if (!exchange(req, resp, deadline, result, crashed)) return result;
    ++served_;

    collect_messages(resp, split.line_offset, result);
    bool any_error = false;
    bool unsolved_only = true;
    for (const auto& d : result.messages) {
      if (d.severity != Severity::Error) continue;
      any_error = true;
      if (d.text.find("unsolved goals") == std::string::npos) unsolved_only = false;
    }
    bool has_sorries = false;
    if (resp.contains("sorries")) {
      for (const auto& s : resp["sorries"]) {
        has_sorries = true;
        std::string goal = s.value("goal", "");
        result.sorry_states.push_back(parse_goal_state(goal));
      }
    }
    if (!any_error && !has_sorries) {
      result.status = VerifyStatus::Proved;
    } else if (has_sorries || (any_error && unsolved_only)) {
      result.status = VerifyStatus::Incomplete;
    } else {
      result.status = VerifyStatus::Failed;
    }
    return result;
  }

  bool exchange(const json& req, json& resp, double deadline, VerificationResult& result,
                bool& crashed) {
    if (!send_line(req.dump(), deadline)) {
      crashed = true;
      return false;
    }
    std::string line;
    bool timed_out = false;
    if (!read_line(line, deadline, timed_out)) {
      if (timed_out) {
        // Kill and recycle; a stuck tactic would otherwise wedge the worker.
        stop();
        result.status = VerifyStatus::Timeout;
        result.messages.push_back({Severity::Error, 1, 0, "verification timed out"});
        return false;
      }
      crashed = true;
      return false;
    }
    try {
      resp = json::parse(line);
    } catch (const json::exception&) {
      crashed = true;
      return false;
    }
    return true;
  }

  static bool has_errors(const json& resp) {
    if (!resp.contains("messages")) return false;
    for (const auto& m : resp["messages"]) {
      if (m.value("severity", "") == "error") return true;
    }
    return false;
  }

  static void collect_messages(const json& resp, int line_offset, VerificationResult& result) {
    if (!resp.contains("messages")) return;
    for (const auto& m : resp["messages"]) {
      Diagnostic d;
      std::string sev = m.value("severity", "info");
      d.severity = sev == "error" ? Severity::Error
                  : sev == "warning" ? Severity::Warning
                                     : Severity::Info;
      if (m.contains("pos") && m["pos"].is_object()) {
        d.line = m["pos"].value("line", 1) + line_offset;
        d.column = m["pos"].value("column", 0);
      }
      d.text = m.value("data", "");
      result.messages.push_back(std::move(d));
    }
  }
};

ReplPool::ReplPool(PoolConfig config) : config_(std::move(config)) {
  // A worker that died mid-request must surface as a crash, not kill the
  // whole process through SIGPIPE on the next write.
  signal(SIGPIPE, SIG_IGN);
  int n = config_.pool_size;
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency()) - 1;
    if (n < 1) n = 1;
  }
  for (int i = 0; i < n; ++i) {
    workers_.push_back(std::make_unique<Worker>(config_));
  }
  for (int i = 0; i < n; ++i) {
    threads_.emplace_back([this, i] { worker_loop(*workers_[static_cast<size_t>(i)]); });
  }
}

ReplPool::~ReplPool() { shutdown(); }

void ReplPool::shutdown() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (stopping_) return;
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  threads_.clear();
}

void ReplPool::worker_loop(Worker& worker) {
  for (;;) {
    Job job;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) {
        if (stopping_) return;
        continue;
      }
      job = std::move(queue_.front());
      queue_.pop_front();
    }
    try {
      job.promise.set_value(worker.process(job.request));
    } catch (...) {
      job.promise.set_exception(std::current_exception());
    }
  }
}

std::future<VerificationResult> ReplPool::submit(const OracleRequest& request) {
  Job job;
  job.request = request;
  std::future<VerificationResult> fut = job.promise.get_future();
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (stopping_) throw Error("pool is shut down");
    queue_.push_back(std::move(job));
  }
  cv_.notify_one();
  return fut;
}

VerificationResult ReplPool::verify(const OracleRequest& request) {
  return submit(request).get();
}

std::vector<std::optional<ProofState>> ReplPool::collect_states(const TheoremScript& script,
                                                                double timeout_s) {
  std::vector<const TacticLine*> effective;
  for (const auto& tl : script.body) {
    if (tl.kind != LineKind::CommentOrBlank) effective.push_back(&tl);
  }
  int base = script.base_indent();
  std::string indent(static_cast<size_t>(base), ' ');
  size_t n = effective.size();

  std::vector<std::future<VerificationResult>> futures;
  for (size_t m = 0; m <= n; ++m) {
    std::string source = script.preamble;
    source += script.header_verbatim.empty() ? script.statement_text() + " := by"
                                             : script.header_verbatim;
    source += '\n';
    for (size_t i = 0; i < m; ++i) {
      source += util::rtrim(effective[i]->text);
      source += '\n';
    }
    source += indent + "all_goals sorry\n";
    OracleRequest req;
    req.source_text = source;
    req.mode = OracleMode::States;
    req.timeout_s = timeout_s > 0 ? timeout_s : config_.default_timeout_s;
    futures.push_back(submit(req));
  }

  std::vector<std::optional<ProofState>> states;
  states.reserve(n + 1);
  for (size_t m = 0; m <= n; ++m) {
    VerificationResult r = futures[m].get();
    if (r.status == VerifyStatus::Proved) {
      states.emplace_back(ProofState{});  // terminal: no goals left
    } else if (r.status == VerifyStatus::Incomplete && !r.sorry_states.empty()) {
      ProofState merged = r.sorry_states.front();
      for (size_t i = 1; i < r.sorry_states.size(); ++i) {
        for (const auto& g : r.sorry_states[i].goals) merged.goals.push_back(g);
      }
      states.emplace_back(std::move(merged));
    } else {
      states.emplace_back(std::nullopt);  // oracle cannot report this position
    }
  }
  return states;
}

}  // namespace lemmaforge
