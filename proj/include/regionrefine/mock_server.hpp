#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>

namespace rr {

enum class MockMode {
  echo,        // return the focused input
  reference,   // return the reference resized to the input (echo when absent)
  noise,       // input plus seeded uniform noise of `noise_amplitude`
  fail_500,    // always answer HTTP 500
  garbage,     // 200 with a body that is not the response schema
  slow,        // sleep `delay_ms` before echoing
  wrong_dims,  // echo at half resolution
};

MockMode mock_mode_from_string(const std::string& name);
std::string to_string(MockMode mode);

struct MockOptions {
  MockMode mode = MockMode::echo;
  double noise_amplitude = 0.05;
  std::uint64_t seed = 0;
  int delay_ms = 2000;
};

// In-process refiner service speaking the /v1/refine protocol, used by the
// integration tests and shipped as the mock_refiner tool.
class MockRefinerServer {
 public:
  explicit MockRefinerServer(MockOptions options);
  ~MockRefinerServer();
  MockRefinerServer(const MockRefinerServer&) = delete;
  MockRefinerServer& operator=(const MockRefinerServer&) = delete;

  // Binds (port 0 picks a free port), starts serving on a background thread
  // and returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Serves on the calling thread until stop().
  void listen_blocking(const std::string& host, int port);
  void stop();

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace rr
