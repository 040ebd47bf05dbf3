// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include "lasp/executor.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <system_error>
#include <thread>

extern char** environ;

namespace lasp {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size()))
    ++n;
  return n;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

}  // namespace

// ---------------------------------------------------------------------------

void NoiseSpec::validate() const {
  if (!(level >= 0.0 && level <= 0.5)) throw std::invalid_argument("noise level must lie in [0, 0.5]");
}

double apply_noise(double value, const NoiseSpec& noise, std::uint64_t draw_index, NoiseStream stream) {
  if (noise.level == 0.0) return value;
  const std::uint64_t key =
      mix(mix(noise.seed) ^ mix(draw_index * 0x632be59bd9b4e019ULL + static_cast<std::uint64_t>(stream)));
  const double unit = static_cast<double>(key >> 11) * 0x1.0p-53;  // [0, 1)
  const double u = noise.level * (2.0 * unit - 1.0);
  return value * (1.0 + u);
}

// ---------------------------------------------------------------------------

ExecutionFault::ExecutionFault(const std::string& what, int exit_code, std::string output)
    : std::runtime_error(what), exit_code_(exit_code), output_(std::move(output)) {}

ConstantProbe::ConstantProbe(double watts) : watts_(watts) {
  if (!(watts > 0.0) || !std::isfinite(watts)) throw MeasurementError("constant probe needs a positive wattage");
}

double parse_power_reading(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr == text.data()) throw MeasurementError("unreadable power value '" + std::string(text) + "'");
  const auto unit = trim(std::string_view(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr)));
  if (unit.empty() || unit == "W") {
  } else if (unit == "mW") {
    value *= 1e-3;
  } else if (unit == "uW") {
    value *= 1e-6;
  } else {
    throw MeasurementError("unknown power unit '" + std::string(unit) + "'");
  }
  if (!(value > 0.0) || !std::isfinite(value)) throw MeasurementError("power reading must be positive and finite");
  return value;
}

FileProbe::FileProbe(std::string path) : path_(std::move(path)) {}

double FileProbe::read() {
  std::ifstream in(path_);
  if (!in) throw MeasurementError("probe cannot open '" + path_ + "'");
  std::string line;
  std::getline(in, line);
  return parse_power_reading(line);
}

std::unique_ptr<PowerProbe> make_probe(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto kind = spec.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (kind == "constant") return std::make_unique<ConstantProbe>(parse_power_reading(arg));
  if (kind == "file" && !arg.empty()) return std::make_unique<FileProbe>(std::string(arg));
  throw std::invalid_argument("probe must be 'constant:<watts>' or 'file:<path>', got '" + std::string(spec) + "'");
}

// ---------------------------------------------------------------------------

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> args;
  std::string current;
  bool in_token = false;
  char quote = 0;
  for (char c : command) {
    if (quote) {
      if (c == quote) quote = 0;
      else current += c;
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (in_token) args.push_back(std::move(current));
      current.clear();
      in_token = false;
    } else {
      current += c;
      in_token = true;
    }
  }
  if (quote) throw ContractError("unterminated quote in command template");
  if (in_token) args.push_back(std::move(current));
  return args;
}

std::vector<std::string> substitute(std::string_view command_template, const ConfigSpace& space,
                                    const Configuration& config) {
  const auto& params = space.parameters();
  for (const auto& p : params) {
    const auto n = count_occurrences(command_template, p.substitution_token);
    if (n != 1) {
      throw ContractError("token '" + p.substitution_token + "' for parameter '" + p.name + "' appears " +
                          std::to_string(n) + " times in the command template; expected exactly once");
    }
  }
  auto args = split_command(command_template);
  if (args.empty()) throw ContractError("empty command template");
  for (auto& arg : args) {
    for (std::size_t p = 0; p < params.size(); ++p)
      replace_all(arg, params[p].substitution_token, params[p].values.at(config.assignment.at(p)));
  }
  return args;
}

CommandSpec command_from_section(const std::map<std::string, std::string>& section) {
  CommandSpec spec;
  auto run = section.find("run");
  if (run == section.end() || run->second.empty()) throw ContractError("[command] section has no 'run' entry");
  spec.command_template = run->second;
  if (auto poll = section.find("poll_ms"); poll != section.end()) {
    int ms = 0;
    auto [ptr, ec] = std::from_chars(poll->second.data(), poll->second.data() + poll->second.size(), ms);
    if (ec != std::errc{} || ms <= 0) throw ContractError("poll_ms must be a positive integer");
    spec.poll_interval = std::chrono::milliseconds(ms);
  }
  return spec;
}

// ---------------------------------------------------------------------------

namespace {

class Poller {
 public:
  Poller(PowerProbe& probe, std::chrono::milliseconds interval)
      : probe_(probe), interval_(interval), thread_([this] { loop(); }) {}

  ~Poller() { stop(); }

  void stop() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
  }

  /// Mean of all readings; rethrows a probe fault.
  double mean() {
    stop();
    if (fault_) std::rethrow_exception(fault_);
    if (count_ == 0) return probe_.read();
    return sum_ / static_cast<double>(count_);
  }

 private:
  void loop() {
    std::unique_lock lock(mutex_);
    while (true) {
      try {
        lock.unlock();
        const double watts = probe_.read();
        lock.lock();
        sum_ += watts;
        ++count_;
      } catch (...) {
        if (!lock.owns_lock()) lock.lock();
        fault_ = std::current_exception();
        return;
      }
      if (cv_.wait_for(lock, interval_, [this] { return stopping_; })) return;
    }
  }

  PowerProbe& probe_;
  std::chrono::milliseconds interval_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stopping_ = false;
  double sum_ = 0.0;
  std::size_t count_ = 0;
  std::exception_ptr fault_;
  std::thread thread_;
};

struct Pipe {
  int fd[2] = {-1, -1};
  Pipe() {
    if (::pipe(fd) != 0) throw std::system_error(errno, std::generic_category(), "pipe");
  }
  ~Pipe() {
    for (int f : fd)
      if (f >= 0) ::close(f);
  }
  void close_end(int i) {
    if (fd[i] >= 0) ::close(fd[i]);
    fd[i] = -1;
  }
};

}  // namespace

Sample evaluate_command(const CommandSpec& command, const ConfigSpace& space, const Configuration& config,
                        PowerProbe& probe, const NoiseSpec& noise, std::uint64_t draw_index) {
  const auto args = substitute(command.command_template, space, config);
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  Pipe out;
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.fd[1], STDERR_FILENO);
  posix_spawn_file_actions_addclose(&actions, out.fd[0]);

  Poller poller(probe, command.poll_interval);
  const auto start = std::chrono::steady_clock::now();
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  out.close_end(1);
  if (rc != 0) {
    poller.stop();
    throw ExecutionFault("cannot start '" + args[0] + "': " + std::strerror(rc), 127, {});
  }

  std::string captured;
  char buffer[4096];
  while (true) {
    const ssize_t n = ::read(out.fd[0], buffer, sizeof buffer);
    if (n > 0) captured.append(buffer, static_cast<std::size_t>(n));
    else if (n == 0 || errno != EINTR) break;
  }
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  const auto end = std::chrono::steady_clock::now();
  poller.stop();

  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    throw ExecutionFault("command '" + args[0] + "' failed with exit status " + std::to_string(code) + " for " +
                             space.describe(config),
                         code, std::move(captured));
  }
  const double watts = poller.mean();

  Sample s;
  s.config_index = config.index;
  s.exec_time = std::chrono::duration<double>(end - start).count();
  s.power = watts;
  s.fidelity = 1.0;
  s.noise_applied = noise.level;
  if (noise.on_time) s.exec_time = apply_noise(s.exec_time, noise, draw_index, NoiseStream::time);
  if (noise.on_power) s.power = apply_noise(s.power, noise, draw_index, NoiseStream::power);
  return s;
}

Sample evaluate_surface(const SyntheticSurface& surface, const Configuration& config, double q,
                        const NoiseSpec& noise, std::uint64_t draw_index) {
  Sample s;
  s.config_index = config.index;
  s.exec_time = surface.time(config, q);
  s.power = surface.power(config, q);
  s.fidelity = q;
  s.noise_applied = noise.level;
  if (noise.on_time) s.exec_time = apply_noise(s.exec_time, noise, draw_index, NoiseStream::time);
  if (noise.on_power) s.power = apply_noise(s.power, noise, draw_index, NoiseStream::power);
  return s;
}

}  // namespace lasp
