#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "fsqkd/endpoint.hpp"

namespace fsqkd {

/// Frame transport over a connected TCP socket (POSIX).
class TcpTransport final : public Transport {
 public:
  /// Connects to host:port, retrying until `timeout_ms` elapses.
  static std::unique_ptr<TcpTransport> connect(const std::string& host, std::uint16_t port,
                                               int timeout_ms = 5000);

  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void send(const Frame& frame) override;
  Frame receive() override;

 private:
  friend class TcpListener;
  explicit TcpTransport(int fd) : fd_(fd) {}
  int fd_;
};

/// Listening socket; accepts one peer per call.
class TcpListener {
 public:
  /// port 0 picks an ephemeral port; see port().
  TcpListener(const std::string& bind_host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  std::unique_ptr<TcpTransport> accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace fsqkd
