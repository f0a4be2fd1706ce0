// Stand-alone mock of the /v1/refine service for local runs of the external backend.

#include <CLI11.hpp>

#include <iostream>

#include "regionrefine/errors.hpp"
#include "regionrefine/mock_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mock refiner service speaking the /v1/refine protocol"};
  std::string host = "127.0.0.1", mode = "echo";
  int port = 8080;
  rr::MockOptions opts;
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port");
  app.add_option("--mode", mode, "echo | reference | noise | fail_500 | garbage | slow | wrong_dims");
  app.add_option("--noise", opts.noise_amplitude, "Noise amplitude (noise mode)");
  app.add_option("--seed", opts.seed, "Noise seed");
  app.add_option("--delay-ms", opts.delay_ms, "Delay (slow mode)");
  CLI11_PARSE(app, argc, argv);

  try {
    opts.mode = rr::mock_mode_from_string(mode);
    rr::MockRefinerServer server(opts);
    std::cerr << "mock refiner (" << mode << ") on http://" << host << ":" << port << "/v1/refine\n";
    server.listen_blocking(host, port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
