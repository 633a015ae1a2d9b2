// Copyright 2026 The amrperturb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-delimited JSON protocol spoken with external model adapters.
//
// The adapter runs as a child process (`/bin/sh -c CMD`). It first writes a
// handshake line {"protocol": "amrfact-scorer/1"}, then answers every request
// line with exactly one response line carrying the same id. Responses may
// come back in any order.
//
//   {"id": ..., "task": "entailment"|"relevance", "premise": ..., "hypothesis": ...}
//     -> {"id": ..., "score": <number>}
//   {"id": ..., "task": "text2amr"|"amr2text", "input": ...}
//     -> {"id": ..., "output": <string>}
//
// A response {"id": ..., "error": ...} aborts the batch.

#ifndef AMRPERTURB_ADAPTER_HPP
#define AMRPERTURB_ADAPTER_HPP

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "amrperturb/error.hpp"
#include "json.hpp"

namespace amrperturb::adapter {

inline constexpr std::string_view kProtocol = "amrfact-scorer/1";
inline constexpr std::chrono::milliseconds kDefaultTimeout{60000};

// A child process with its stdin and stdout connected to pipes. stderr is
// inherited.
class ChildProcess {
 public:
  explicit ChildProcess(const std::string& command) {
    // A dead adapter must surface as a protocol error, not kill us.
    ::signal(SIGPIPE, SIG_IGN);
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0) throw ProtocolError("pipe: " + std::string(std::strerror(errno)));
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw ProtocolError("pipe: " + std::string(std::strerror(errno)));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw ProtocolError("fork: " + std::string(std::strerror(errno)));
    }
    if (pid_ == 0) {
      // Own process group, so a shell wrapper and its children die together.
      ::setpgid(0, 0);
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid_, pid_);
    ::close(to_child[0]);
    ::close(from_child[1]);
    stdin_fd_ = to_child[1];
    stdout_fd_ = from_child[0];
    ::fcntl(stdin_fd_, F_SETFD, FD_CLOEXEC);
    ::fcntl(stdout_fd_, F_SETFD, FD_CLOEXEC);
    ::fcntl(stdin_fd_, F_SETFL, ::fcntl(stdin_fd_, F_GETFL) | O_NONBLOCK);
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() {
    CloseInput();
    if (stdout_fd_ >= 0) ::close(stdout_fd_);
    if (pid_ > 0) {
      int status = 0;
      // Give a well-behaved adapter the chance to exit on EOF.
      for (int i = 0; i < 50; ++i) {
        if (::waitpid(pid_, &status, WNOHANG) == pid_) return;
        ::usleep(2000);
      }
      ::kill(-pid_, SIGTERM);
      ::waitpid(pid_, &status, 0);
      ::kill(-pid_, SIGKILL);
    }
  }

  void CloseInput() {
    if (stdin_fd_ >= 0) {
      ::close(stdin_fd_);
      stdin_fd_ = -1;
    }
  }

  std::string ReadLine(std::chrono::milliseconds timeout) {
    auto lines = Exchange({}, 1, timeout);
    return lines.front();
  }

  // Writes `requests` (one per line) while collecting `expected` response
  // lines, so neither side can block on a full pipe.
  std::vector<std::string> Exchange(const std::vector<std::string>& requests, std::size_t expected,
                                    std::chrono::milliseconds timeout) {
    std::string pending;
    for (const auto& r : requests) {
      pending += r;
      pending.push_back('\n');
    }
    std::size_t written = 0;
    std::vector<std::string> lines;
    TakeBufferedLines(lines, expected);
    const auto deadline = std::chrono::steady_clock::now() + timeout;

    while (lines.size() < expected || written < pending.size()) {
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) throw ProtocolError("adapter timed out");
      const int wait_ms = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());

      pollfd fds[2];
      nfds_t count = 0;
      fds[count++] = {stdout_fd_, POLLIN, 0};
      const bool want_write = written < pending.size() && stdin_fd_ >= 0;
      if (want_write) fds[count++] = {stdin_fd_, POLLOUT, 0};
      const int ready = ::poll(fds, count, wait_ms);
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError("poll: " + std::string(std::strerror(errno)));
      }
      if (ready == 0) continue;

      if (want_write && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
        const ssize_t n = ::write(stdin_fd_, pending.data() + written, pending.size() - written);
        if (n < 0 && errno != EAGAIN && errno != EINTR) {
          throw ProtocolError("adapter closed its input: " + std::string(std::strerror(errno)));
        }
        if (n > 0) written += static_cast<std::size_t>(n);
      }
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        char chunk[65536];
        const ssize_t n = ::read(stdout_fd_, chunk, sizeof(chunk));
        if (n < 0) {
          if (errno == EINTR || errno == EAGAIN) continue;
          throw ProtocolError("read: " + std::string(std::strerror(errno)));
        }
        if (n == 0) {
          throw ProtocolError("adapter exited after " + std::to_string(lines.size()) + " of " +
                              std::to_string(expected) + " responses");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
        TakeBufferedLines(lines, expected);
      }
    }
    return lines;
  }

 private:
  void TakeBufferedLines(std::vector<std::string>& lines, std::size_t expected) {
    std::size_t pos;
    while (lines.size() < expected && (pos = buffer_.find('\n')) != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      lines.push_back(std::move(line));
    }
  }

  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::string buffer_;
};

// Launches `command`, checks the handshake, sends `requests` and returns the
// responses keyed by id. Every request must carry a unique string "id"; the
// response ids must be exactly the request ids.
inline std::map<std::string, nlohmann::json> RunBatch(const std::string& command,
                                                      const std::vector<nlohmann::json>& requests,
                                                      std::chrono::milliseconds timeout = kDefaultTimeout) {
  ChildProcess child(command);
  const std::string hello = child.ReadLine(timeout);
  nlohmann::json handshake = nlohmann::json::parse(hello, nullptr, false);
  if (handshake.is_discarded() || !handshake.is_object() || !handshake.contains("protocol") ||
      handshake["protocol"] != kProtocol) {
    throw ProtocolError("bad adapter handshake: " + hello);
  }

  std::set<std::string> ids;
  std::vector<std::string> lines;
  lines.reserve(requests.size());
  for (const auto& r : requests) {
    const std::string id = r.at("id").get<std::string>();
    if (!ids.insert(id).second) throw ProtocolError("duplicate request id " + id);
    lines.push_back(r.dump());
  }
  const auto responses = child.Exchange(lines, requests.size(), timeout);
  child.CloseInput();

  std::map<std::string, nlohmann::json> by_id;
  for (const std::string& line : responses) {
    nlohmann::json response = nlohmann::json::parse(line, nullptr, false);
    if (response.is_discarded() || !response.is_object() || !response.contains("id") ||
        !response["id"].is_string()) {
      throw ProtocolError("malformed adapter response: " + line);
    }
    const std::string id = response["id"].get<std::string>();
    if (response.contains("error")) {
      throw ProtocolError("adapter reported an error for " + id + ": " + response["error"].dump());
    }
    if (!ids.count(id)) throw ProtocolError("adapter answered unknown id " + id);
    if (!by_id.emplace(id, std::move(response)).second) {
      throw ProtocolError("adapter answered id " + id + " twice");
    }
  }
  return by_id;
}

}  // namespace amrperturb::adapter

#endif  // AMRPERTURB_ADAPTER_HPP
