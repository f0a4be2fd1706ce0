#include "regionrefine/backend.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "regionrefine/pasteback.hpp"
#include "regionrefine/png_io.hpp"

namespace rr {

void validate_request(const RefineRequest& r) {
  if (r.focused_input.empty()) throw ParameterError("refine request: empty focused input");
  if (r.region_mask.height() != r.focused_input.height() || r.region_mask.width() != r.focused_input.width())
    throw ParameterError("refine request: mask and focused input differ in shape");
  if (r.instruction.empty()) throw ParameterError("refine request: instruction must not be empty");
}

RefineResult refine(const RefineRequest& request, Refiner& backend) {
  validate_request(request);
  const auto t0 = std::chrono::steady_clock::now();
  RefineResult res;
  res.refined = backend.run(request);
  res.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  res.backend_id = backend.id();
  if (res.refined.height() != request.focused_input.height() || res.refined.width() != request.focused_input.width())
    throw DimensionMismatch("backend " + res.backend_id + " returned " + std::to_string(res.refined.height()) + "x" +
                            std::to_string(res.refined.width()) + ", expected " +
                            std::to_string(request.focused_input.height()) + "x" +
                            std::to_string(request.focused_input.width()));
  if (res.refined.channels() != request.focused_input.channels())
    throw DimensionMismatch("backend " + res.backend_id + " returned wrong channel count");
  normalize_in_place(res.refined);
  return res;
}

RasterImage OracleRefiner::run(const RefineRequest& request) {
  const CropSpec& spec = request.crop_spec;
  if (gt_.height() != spec.canvas_h || gt_.width() != spec.canvas_w)
    throw ParameterError("oracle: ground truth does not match the request canvas");
  return focus_view(gt_, spec);
}

// ---------------------------------------------------------------------------

nlohmann::json encode_request(const RefineRequest& r) {
  nlohmann::json j = {{"image", base64_encode(encode_png(r.focused_input))},
                      {"mask", base64_encode(encode_mask_png(r.region_mask))},
                      {"instruction", r.instruction},
                      {"crop_spec", r.crop_spec}};
  if (r.reference) j["reference"] = base64_encode(encode_png(*r.reference));
  return j;
}

RefineRequest decode_request(const nlohmann::json& j) {
  RefineRequest r;
  r.focused_input = decode_png(base64_decode(j.at("image").get<std::string>()));
  r.region_mask = decode_mask_png(base64_decode(j.at("mask").get<std::string>()));
  r.instruction = j.at("instruction").get<std::string>();
  r.crop_spec = j.at("crop_spec").get<CropSpec>();
  if (j.contains("reference") && !j["reference"].is_null())
    r.reference = decode_png(base64_decode(j["reference"].get<std::string>()));
  return r;
}

std::string encode_response(const RasterImage& image) {
  return nlohmann::json{{"image", base64_encode(encode_png(image))}}.dump();
}

RasterImage decode_response(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    return decode_png(base64_decode(j.at("image").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw PayloadError(std::string("malformed backend response: ") + e.what());
  } catch (const DecodeError& e) {
    throw PayloadError(std::string("malformed backend response: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

HttpRefiner::HttpRefiner(HttpBackendOptions options)
    : options_(std::move(options)), slots_(std::max(1, options_.max_concurrent)) {
  if (options_.base_url.empty()) throw ParameterError("external backend: no base URL configured");
  if (options_.timeout_ms <= 0) throw ParameterError("external backend: timeout must be positive");
  scheme_host_port_ = options_.base_url;
  while (!scheme_host_port_.empty() && scheme_host_port_.back() == '/') scheme_host_port_.pop_back();
}

RasterImage HttpRefiner::attempt(const std::string& body, const RefineRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto secs = options_.timeout_ms / 1000;
  const auto usecs = (options_.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const auto t0 = std::chrono::steady_clock::now();
  auto res = client.Post(kPath, body, "application/json");
  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= 0.9 * options_.timeout_ms))
      throw TimeoutError("backend timed out after " + std::to_string(options_.timeout_ms) + " ms");
    throw TransportError("backend transport failure: " + httplib::to_string(err));
  }
  if (res->status != 200) throw HttpStatusError(res->status, res->body.substr(0, 200));

  RasterImage out = decode_response(res->body);
  if (out.height() != request.focused_input.height() || out.width() != request.focused_input.width())
    throw DimensionMismatch("backend returned " + std::to_string(out.height()) + "x" + std::to_string(out.width()) +
                            ", expected " + std::to_string(request.focused_input.height()) + "x" +
                            std::to_string(request.focused_input.width()));
  if (out.channels() != request.focused_input.channels()) {
    // Gray backends answering colour requests are expanded, not rejected.
    if (out.channels() == 1 && request.focused_input.channels() == 3)
      out = RasterImage({out.channel(0), out.channel(0), out.channel(0)});
    else
      throw DimensionMismatch("backend returned wrong channel count");
  }
  return out;
}

RasterImage HttpRefiner::run(const RefineRequest& request) {
  const std::string body = encode_request(request).dump();
  slots_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{slots_};

  for (int tries = 0;; ++tries) {
    try {
      return attempt(body, request);
    } catch (const HttpStatusError& e) {
      if (e.status() < 500 || tries >= options_.retries) throw;
    } catch (const TransportError&) {
      if (tries >= options_.retries) throw;
    } catch (const TimeoutError&) {
      if (tries >= options_.retries) throw;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50 * (tries + 1)));
  }
}

// ---------------------------------------------------------------------------

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::identity: return "identity";
    case BackendKind::oracle: return "oracle";
    case BackendKind::external: return "external";
  }
  return "unknown";
}

BackendKind backend_kind_from_string(const std::string& name) {
  if (name == "identity") return BackendKind::identity;
  if (name == "oracle") return BackendKind::oracle;
  if (name == "external") return BackendKind::external;
  throw ParameterError("unknown backend kind '" + name + "'");
}

std::unique_ptr<Refiner> make_refiner(const BackendConfig& config, const RasterImage* ground_truth) {
  switch (config.kind) {
    case BackendKind::identity: return std::make_unique<IdentityRefiner>();
    case BackendKind::oracle:
      if (!ground_truth) throw ParameterError("oracle backend needs a ground-truth image");
      return std::make_unique<OracleRefiner>(*ground_truth);
    case BackendKind::external: {
      HttpBackendOptions opts = config.http;
      if (opts.base_url.empty())
        if (const char* env = std::getenv(HttpRefiner::kUrlEnv)) opts.base_url = env;
      return std::make_unique<HttpRefiner>(opts);
    }
  }
  throw ParameterError("unknown backend kind");
}

}  // namespace rr
