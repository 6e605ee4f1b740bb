#include "sizekit/external.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <fcntl.h>
#include <mutex>
#include <regex>
#include <thread>

#include <fmt/format.h>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"
#include "sizekit/units.hpp"

extern char** environ;

namespace sizekit::eval {

namespace {

const std::regex& placeholder_re() {
  static const std::regex re(R"(\{([A-Za-z]+)(?:_([A-Za-z0-9_.]+)|\(([A-Za-z0-9_.]+)\))\})");
  return re;
}

Handle placeholder_handle(const std::smatch& m) {
  const std::string dev = m[2].matched ? m[2].str() : m[3].str();
  return Handle{text::to_upper(dev), text::to_upper(m[1].str())};
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
  return s;
}

/// Looks up a handle ignoring device-name case, since decks and netlists may differ in case.
const double* lookup(const space::Assignment& a, const Handle& h) {
  for (const auto& [k, v] : a) {
    if (text::iequals(k.param, h.param) && text::iequals(k.device, h.device)) return &v;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> template_placeholders(const std::string& deck) {
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(deck.begin(), deck.end(), placeholder_re()); it != std::sregex_iterator(); ++it) {
    std::string s = (*it)[0].str();
    s = s.substr(1, s.size() - 2);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::string render_deck(const std::string& deck, const space::Assignment& a) {
  std::string out;
  auto last = deck.cbegin();
  for (auto it = std::sregex_iterator(deck.begin(), deck.end(), placeholder_re()); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const Handle h = placeholder_handle(m);
    const double* v = lookup(a, h);
    if (!v) throw ConfigError("unresolved placeholder " + m[0].str() + " (no value for " + h.str() + ")");
    out.append(last, m[0].first);
    out += format_value(*v);
    last = m[0].second;
  }
  out.append(last, deck.cend());
  return out;
}

std::map<std::string, double> parse_measurements(const std::string& output) {
  static const std::regex line_re(R"(^\s*([A-Za-z_][A-Za-z0-9_.]*)\s*=\s*(\S+))");
  std::map<std::string, double> out;
  for (const auto& l : text::lines(output)) {
    std::smatch m;
    const std::string s(l);
    if (!std::regex_search(s, m, line_re)) continue;
    std::string v = m[2].str();
    const bool neg = !v.empty() && v.front() == '-';
    auto parsed = try_parse_value(neg || (!v.empty() && v.front() == '+') ? v.substr(1) : v);
    if (!parsed) continue;
    out[text::to_lower(m[1].str())] = neg ? -*parsed : *parsed;
  }
  return out;
}

ProcessResult run_process(const std::string& command, const std::filesystem::path& cwd,
                          const std::filesystem::path& log, double timeout_seconds) {
  ProcessResult r;
  const std::string full = "cd '" + cwd.string() + "' && exec " + command;
  posix_spawn_file_actions_t actions;
  posix_spawnattr_t attr;
  posix_spawn_file_actions_init(&actions);
  posix_spawnattr_init(&attr);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  const char* argv[] = {"/bin/sh", "-c", full.c_str(), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, &attr, const_cast<char**>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) {
    r.spawn_failed = true;
    return r;
  }
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
  int status = 0;
  auto delay = std::chrono::milliseconds(1);
  while (true) {
    const pid_t w = waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (w < 0 && errno != EINTR) {
      r.spawn_failed = true;
      return r;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      r.timed_out = true;
      return r;
    }
    std::this_thread::sleep_for(delay);
    delay = std::min(delay * 2, std::chrono::milliseconds(50));
  }
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  return r;
}

/// Counting semaphore bounding concurrent simulator processes.
struct ExternalEvaluator::Pool {
  std::mutex mutex;
  std::condition_variable cv;
  std::size_t free;
  explicit Pool(std::size_t n) : free(n) {}
  void acquire() {
    std::unique_lock lock(mutex);
    cv.wait(lock, [&] { return free > 0; });
    --free;
  }
  void release() {
    {
      std::lock_guard lock(mutex);
      ++free;
    }
    cv.notify_one();
  }
};

ExternalEvaluator::ExternalEvaluator(ExternalConfig cfg)
    : cfg_(std::move(cfg)), pool_(std::make_unique<Pool>(std::max<std::size_t>(cfg_.pool_size, 1))) {
  if (cfg_.command.empty()) throw ConfigError("external evaluator: empty simulator command");
  if (cfg_.measurements.empty()) throw ConfigError("external evaluator: no measurement map");
  if (!(cfg_.timeout_seconds > 0.0)) throw ConfigError("external evaluator: timeout must be > 0");
}

ExternalEvaluator::~ExternalEvaluator() = default;

std::vector<std::string> ExternalEvaluator::metric_names() const {
  std::vector<std::string> out;
  for (const auto& m : cfg_.measurements) out.push_back(m.metric);
  return out;
}

void ExternalEvaluator::check_space(const space::ParameterSpace& space) const {
  space::Assignment probe;
  for (const auto& h : space.handles()) probe[h] = 1.0;
  render_deck(cfg_.deck_template, probe);
}

opt::Measurement ExternalEvaluator::evaluate(const space::Assignment& a) const {
  opt::Measurement m;
  const std::string deck = render_deck(cfg_.deck_template, a);
  const auto id = counter_++;
  const auto dir = std::filesystem::absolute(cfg_.scratch_root / fmt::format("eval-{}-{}", getpid(), id));
  std::filesystem::create_directories(dir);
  const auto deck_path = dir / "deck.sp";
  const auto out_path = dir / "output.txt";
  const auto log_path = dir / "stdout.txt";
  text::write_file(deck_path, deck);
  std::string cmd = replace_all(cfg_.command, "{deck}", deck_path.string());
  cmd = replace_all(cmd, "{output}", out_path.string());
  cmd = replace_all(cmd, "{scratch}", dir.string());

  pool_->acquire();
  ProcessResult pr;
  try {
    pr = run_process(cmd, dir, log_path, cfg_.timeout_seconds);
  } catch (...) {
    pool_->release();
    throw;
  }
  pool_->release();

  if (pr.spawn_failed || pr.timed_out || pr.exit_code != 0) {
    m.failed = true;
    m.note = pr.timed_out ? "simulator timeout" : fmt::format("simulator exit code {}", pr.exit_code);
  } else {
    std::string text_out;
    std::error_code ec;
    if (std::filesystem::exists(out_path, ec)) text_out += text::read_file(out_path) + "\n";
    if (std::filesystem::exists(log_path, ec)) text_out += text::read_file(log_path);
    const auto meas = parse_measurements(text_out);
    for (const auto& mm : cfg_.measurements) {
      auto it = meas.find(text::to_lower(mm.measurement));
      if (it == meas.end() || !std::isfinite(it->second)) {
        m.failed = true;
        m.note = "measurement '" + mm.measurement + "' missing from simulator output";
        break;
      }
      m.metrics[mm.metric] = mm.scale * it->second;
    }
  }
  if (!cfg_.keep_scratch) {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
  return m;
}

}  // namespace sizekit::eval
