#include "avp/intention.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <iostream>
#include <stdexcept>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace avp
{

std::string base64_encode(const unsigned char * data, std::size_t size)
{
  static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve(4 * ((size + 2) / 3));
  std::size_t i = 0;
  for (; i + 2 < size; i += 3) {
    const unsigned v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back(table[v & 63]);
  }
  if (i + 1 == size) {
    const unsigned v = data[i] << 16;
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == size) {
    const unsigned v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(table[(v >> 18) & 63]);
    out.push_back(table[(v >> 12) & 63]);
    out.push_back(table[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::string scoring_request_json(const ScoringRequest & request)
{
  nlohmann::json j;
  j["type"] = "score";
  j["vehicle"] = request.vehicle;
  j["pose"] = {request.pose.x, request.pose.y, request.pose.theta};
  j["v_bar"] = request.v_bar;
  j["d_ent"] = request.d_ent;
  j["t_lot"] = request.t_lot;
  auto spots = nlohmann::json::array();
  for (std::size_t i = 0; i < request.spots.size(); ++i) {
    const auto & f = request.spot_features[i];
    spots.push_back({{"index", request.spots[i]}, {"d", f.d}, {"a", f.a}});
  }
  j["spots"] = std::move(spots);
  auto expl = nlohmann::json::array();
  for (const auto & q : request.exploration_points) {
    expl.push_back({q.x, q.y, q.theta});
  }
  j["exploration"] = std::move(expl);
  if (!request.rasters.empty()) {
    nlohmann::json bev;
    bev["rows"] = request.rasters.front().rows();
    bev["cols"] = request.rasters.front().cols();
    bev["channels"] = 3;
    bev["encoding"] = "base64-u8-hwc";
    auto images = nlohmann::json::array();
    for (const auto & r : request.rasters) {
      const auto bytes = r.to_bytes();
      images.push_back(base64_encode(bytes.data(), bytes.size()));
    }
    bev["images"] = std::move(images);
    j["bev"] = std::move(bev);
  }
  return j.dump();
}

IntentionDistribution parse_scoring_response(const std::string & line, const ScoringRequest & request)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception & e) {
    throw std::runtime_error(std::string("scorer response is not JSON: ") + e.what());
  }
  const auto spot_probs = j.value("spot_probs", std::vector<double>{});
  const auto expl_probs = j.value("exploration_probs", std::vector<double>{});
  if (spot_probs.size() != request.spots.size() || expl_probs.size() != request.exploration_points.size()) {
    throw std::runtime_error("scorer response has the wrong number of probabilities");
  }
  double sum = 0.0;
  for (double p : spot_probs) {
    if (!(p >= 0.0)) {
      throw std::runtime_error("scorer response has a negative probability");
    }
    sum += p;
  }
  for (double p : expl_probs) {
    if (!(p >= 0.0)) {
      throw std::runtime_error("scorer response has a negative probability");
    }
    sum += p;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw std::runtime_error("scorer response probabilities do not sum to a positive value");
  }
  IntentionDistribution dist;
  for (std::size_t i = 0; i < spot_probs.size(); ++i) {
    dist.spot_probs.emplace_back(request.spots[i], spot_probs[i] / sum);
  }
  std::sort(dist.spot_probs.begin(), dist.spot_probs.end());
  dist.exploration_points = request.exploration_points;
  for (double p : expl_probs) {
    dist.exploration_probs.push_back(p / sum);
  }
  return dist;
}

ExternalScorer::ExternalScorer(std::string command, double timeout_s, HeuristicWeights fallback)
: command_(std::move(command)), timeout_s_(timeout_s), fallback_(fallback)
{
  std::signal(SIGPIPE, SIG_IGN);
}

ExternalScorer::~ExternalScorer() { stop_child(); }

bool ExternalScorer::ensure_child()
{
  if (pid_ > 0) {
    return true;
  }
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) {
    return false;
  }
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    return false;
  }
  const pid_t pid = fork();
  if (pid < 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    return false;
  }
  if (pid == 0) {
    // Own process group, so a stuck scorer and anything it spawned can be killed together.
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char *>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  fcntl(to_child_, F_SETFL, fcntl(to_child_, F_GETFL) | O_NONBLOCK);
  fcntl(from_child_, F_SETFL, fcntl(from_child_, F_GETFL) | O_NONBLOCK);
  buffer_.clear();
  return true;
}

void ExternalScorer::stop_child()
{
  if (to_child_ >= 0) {
    close(to_child_);
    to_child_ = -1;
  }
  if (from_child_ >= 0) {
    close(from_child_);
    from_child_ = -1;
  }
  if (pid_ > 0) {
    kill(-pid_, SIGKILL);
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
  buffer_.clear();
}

std::optional<std::string> ExternalScorer::exchange(const std::string & line)
{
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration<double>(timeout_s_);
  auto remaining_ms = [&]() {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
    return static_cast<int>(std::max<long long>(left, 0));
  };

  const std::string payload = line + "\n";
  std::size_t written = 0;
  while (written < payload.size()) {
    pollfd pfd{to_child_, POLLOUT, 0};
    const int ready = poll(&pfd, 1, remaining_ms());
    if (ready <= 0 || (pfd.revents & (POLLERR | POLLHUP))) {
      return std::nullopt;
    }
    const ssize_t n = write(to_child_, payload.data() + written, payload.size() - written);
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) {
        continue;
      }
      return std::nullopt;
    }
    written += static_cast<std::size_t>(n);
  }

  char chunk[4096];
  while (true) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string out = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      return out;
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, remaining_ms());
    if (ready <= 0) {
      return std::nullopt;
    }
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n == 0) {
      return std::nullopt;
    }
    if (n < 0) {
      if (errno == EAGAIN || errno == EINTR) {
        continue;
      }
      return std::nullopt;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

IntentionDistribution ExternalScorer::score(const ScoringRequest & request)
{
  if (ensure_child()) {
    const auto reply = exchange(scoring_request_json(request));
    if (reply) {
      try {
        return parse_scoring_response(*reply, request);
      } catch (const std::exception & e) {
        std::cerr << "warning: external scorer: " << e.what() << "; using heuristic scores\n";
      }
    } else {
      std::cerr << "warning: external scorer timed out or exited; using heuristic scores\n";
    }
  } else {
    std::cerr << "warning: cannot start external scorer; using heuristic scores\n";
  }
  // The child's stream position is unknown after a failure; start a fresh one next time.
  stop_child();
  ++fallbacks_;
  return fallback_.score(request);
}

}  // namespace avp
