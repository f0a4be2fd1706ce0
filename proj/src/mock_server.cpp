#include "regionrefine/mock_server.hpp"

#include "regionrefine/backend.hpp"
#include "regionrefine/rng.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a `res` macro.
#include <httplib.h>

namespace rr {

MockMode mock_mode_from_string(const std::string& name) {
  if (name == "echo") return MockMode::echo;
  if (name == "reference") return MockMode::reference;
  if (name == "noise") return MockMode::noise;
  if (name == "fail_500") return MockMode::fail_500;
  if (name == "garbage") return MockMode::garbage;
  if (name == "slow") return MockMode::slow;
  if (name == "wrong_dims") return MockMode::wrong_dims;
  throw ParameterError("unknown mock mode '" + name + "'");
}

std::string to_string(MockMode mode) {
  switch (mode) {
    case MockMode::echo: return "echo";
    case MockMode::reference: return "reference";
    case MockMode::noise: return "noise";
    case MockMode::fail_500: return "fail_500";
    case MockMode::garbage: return "garbage";
    case MockMode::slow: return "slow";
    case MockMode::wrong_dims: return "wrong_dims";
  }
  return "unknown";
}

struct MockRefinerServer::Impl {
  MockOptions options;
  httplib::Server server;

  RasterImage respond(const RefineRequest& req) const {
    const RasterImage& in = req.focused_input;
    switch (options.mode) {
      case MockMode::reference: {
        if (!req.reference) return in;
        RasterImage ref = resize(*req.reference, in.height(), in.width(), Interp::bilinear);
        if (ref.channels() == in.channels()) return ref;
        if (ref.channels() == 1) return RasterImage(std::vector<Plane<float>>(in.channels(), ref.channel(0)));
        // colour reference, gray request: take the mean
        Plane<float> mean = (ref.channel(0) + ref.channel(1) + ref.channel(2)) / 3.0f;
        return RasterImage({mean});
      }
      case MockMode::noise: {
        // Seed from the request geometry so repeated calls agree.
        const auto& b = req.crop_spec.box;
        Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>((b.y1 * 131071 + b.x1) * 8191 + b.x2)));
        RasterImage out = in;
        for (Index c = 0; c < out.channels(); ++c)
          for (Index y = 0; y < out.height(); ++y)
            for (Index x = 0; x < out.width(); ++x)
              out(y, x, c) = std::clamp(
                  out(y, x, c) + static_cast<float>(options.noise_amplitude * rng.uniform(-1.0, 1.0)), 0.0f, 1.0f);
        return out;
      }
      case MockMode::wrong_dims:
        return resize(in, std::max<Index>(1, in.height() / 2), std::max<Index>(1, in.width() / 2), Interp::nearest);
      default:
        return in;
    }
  }
};

MockRefinerServer::MockRefinerServer(MockOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
  impl_->server.Post(HttpRefiner::kPath, [this](const httplib::Request& req, httplib::Response& res) {
    const MockOptions& opt = impl_->options;
    if (opt.mode == MockMode::fail_500) {
      res.status = 500;
      res.set_content("{\"error\":\"mock failure\"}", "application/json");
      return;
    }
    if (opt.mode == MockMode::garbage) {
      res.status = 200;
      res.set_content("{\"image\": \"!!not base64 png!!\"", "application/json");
      return;
    }
    if (opt.mode == MockMode::slow) std::this_thread::sleep_for(std::chrono::milliseconds(opt.delay_ms));
    try {
      const RefineRequest request = decode_request(nlohmann::json::parse(req.body));
      res.set_content(encode_response(impl_->respond(request)), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  });
}

MockRefinerServer::~MockRefinerServer() { stop(); }

int MockRefinerServer::start(const std::string& host, int port) {
  if (port == 0)
    port_ = impl_->server.bind_to_any_port(host);
  else if (impl_->server.bind_to_port(host, port))
    port_ = port;
  else
    port_ = -1;
  if (port_ < 0) throw IoError("mock server: cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void MockRefinerServer::listen_blocking(const std::string& host, int port) {
  port_ = port;
  if (!impl_->server.listen(host, port)) throw IoError("mock server: cannot listen on " + host + ":" + std::to_string(port));
}

void MockRefinerServer::stop() {
  if (impl_) impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace rr
