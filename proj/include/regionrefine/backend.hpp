#pragma once

#include <nlohmann/json.hpp>

#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "regionrefine/focus.hpp"
#include "regionrefine/raster.hpp"

namespace rr {

struct RefineRequest {
  RasterImage focused_input;  // I_c at target resolution
  std::optional<RasterImage> reference;
  BinaryMask region_mask;  // M_c at target resolution
  std::string instruction;
  CropSpec crop_spec;
};

struct RefineResult {
  RasterImage refined;
  std::string backend_id;
  double latency_ms = 0.0;
};

// Throws ParameterError when the request breaks its shape/instruction invariants.
void validate_request(const RefineRequest& request);

class Refiner {
 public:
  virtual ~Refiner() = default;
  virtual std::string id() const = 0;
  // Implementations return an image with the focused input's dimensions.
  virtual RasterImage run(const RefineRequest& request) = 0;
};

// Validates the request, times the call and checks the returned image.
RefineResult refine(const RefineRequest& request, Refiner& backend);

class IdentityRefiner final : public Refiner {
 public:
  std::string id() const override { return "identity"; }
  RasterImage run(const RefineRequest& request) override { return request.focused_input; }
};

// Answers with the ground-truth canvas viewed through the request's crop spec.
class OracleRefiner final : public Refiner {
 public:
  explicit OracleRefiner(RasterImage ground_truth) : gt_(std::move(ground_truth)) {}
  std::string id() const override { return "oracle"; }
  RasterImage run(const RefineRequest& request) override;

 private:
  RasterImage gt_;
};

struct HttpBackendOptions {
  std::string base_url;  // e.g. http://127.0.0.1:8080
  int timeout_ms = 30000;
  int retries = 2;  // extra attempts after transport failures, timeouts and 5xx
  int max_concurrent = 4;
};

// Client for the /v1/refine protocol:
//   POST {image, mask, reference?, instruction, crop_spec}  (PNGs base64 encoded)
//   200  {image}
// Failures map to TransportError, TimeoutError, HttpStatusError, PayloadError
// and DimensionMismatch.
class HttpRefiner final : public Refiner {
 public:
  explicit HttpRefiner(HttpBackendOptions options);
  std::string id() const override { return "external"; }
  RasterImage run(const RefineRequest& request) override;

  static constexpr const char* kPath = "/v1/refine";
  static constexpr const char* kUrlEnv = "REGIONREFINE_BACKEND_URL";

 private:
  RasterImage attempt(const std::string& body, const RefineRequest& request);

  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::counting_semaphore<> slots_;
};

enum class BackendKind { identity, oracle, external };

struct BackendConfig {
  BackendKind kind = BackendKind::identity;
  HttpBackendOptions http;

  friend bool operator==(const BackendConfig& a, const BackendConfig& b) {
    return a.kind == b.kind && a.http.base_url == b.http.base_url && a.http.timeout_ms == b.http.timeout_ms &&
           a.http.retries == b.http.retries && a.http.max_concurrent == b.http.max_concurrent;
  }
};

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& name);

// `ground_truth` is required for the oracle backend and ignored otherwise. An
// external backend with no URL falls back to the REGIONREFINE_BACKEND_URL
// environment variable.
std::unique_ptr<Refiner> make_refiner(const BackendConfig& config, const RasterImage* ground_truth = nullptr);

// Wire format helpers shared by the client, the mock server and the
// external inpainter.
nlohmann::json encode_request(const RefineRequest& request);
RefineRequest decode_request(const nlohmann::json& body);
std::string encode_response(const RasterImage& image);
// Throws PayloadError on anything that is not {image: base64 PNG}.
RasterImage decode_response(const std::string& body);

}  // namespace rr
