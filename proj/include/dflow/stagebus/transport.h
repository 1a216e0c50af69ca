/* Copyright 2026 The duplexflow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace dflow::stagebus {

/// Ordered, newline-framed byte stream to one peer.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  /// Writes the line as given; callers include the trailing newline.
  virtual void send_line(std::string_view line) = 0;
  /// Next line without its newline, or nullopt if none arrives in time.
  /// Throws IoError when the peer has closed the stream.
  virtual std::optional<std::string> receive_line(std::chrono::milliseconds timeout) = 0;
};

/// Channel over a pair of file descriptors.
class FdChannel : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd, bool owns_fds);
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  void send_line(std::string_view line) override;
  std::optional<std::string> receive_line(std::chrono::milliseconds timeout) override;

 protected:
  void close_fds();

 private:
  int read_fd_;
  int write_fd_;
  bool owns_;
  std::string buffer_;
};

/// Runs `/bin/sh -c command` with its stdin and stdout as the channel.
class ChildProcessChannel final : public FdChannel {
 public:
  static std::unique_ptr<ChildProcessChannel> spawn(const std::string& command);
  ~ChildProcessChannel() override;

 private:
  ChildProcessChannel(int read_fd, int write_fd, int pid);
  int pid_;
};

std::unique_ptr<FdChannel> tcp_connect(const std::string& host, std::uint16_t port);

class TcpListener {
 public:
  /// Port 0 picks a free port; see port().
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<FdChannel> accept();

 private:
  int fd_;
  std::uint16_t port_;
};

/// "stdio:<command line>" or "tcp:<host>:<port>". Throws StageError when the
/// endpoint cannot be reached and ConfigError when it is malformed.
std::unique_ptr<LineChannel> connect_endpoint(std::string_view endpoint);

}  // namespace dflow::stagebus
