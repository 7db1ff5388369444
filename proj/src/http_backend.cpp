#include <httplib.h>

#include "knowcat/sampler.hpp"

namespace knowcat {

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw UsageError("endpoint must be an absolute http(s) URL: " +
                     config_.endpoint);
  }
  const auto path_start = config_.endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = config_.endpoint;
    path_ = "/";
  } else {
    scheme_host_port_ = config_.endpoint.substr(0, path_start);
    path_ = config_.endpoint.substr(path_start);
  }
}

Json HttpBackend::make_request_body(std::string_view model_id,
                                    const GenerationRequest& request) {
  Json body;
  body["model"] = model_id;
  body["messages"] = Json::array(
      {Json{{"role", "user"}, {"content", std::string(request.prompt)}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  return body;
}

std::string HttpBackend::parse_response_body(std::string_view body) {
  try {
    const Json j = Json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_null()) return {};
    return content.get<std::string>();
  } catch (const Json::exception& e) {
    throw BackendError(std::string("malformed completion response: ") + e.what(),
                       false);
  }
}

std::string HttpBackend::generate(const GenerationRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto secs = static_cast<time_t>(config_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  if (!config_.api_key.empty()) client.set_bearer_token_auth(config_.api_key);

  const auto body = make_request_body(config_.model_id, request).dump();
  auto res = client.Post(path_, body, "application/json");
  if (!res) {
    throw BackendError("request to " + config_.endpoint + " failed: " +
                           httplib::to_string(res.error()),
                       true);
  }
  if (res->status != 200) {
    const bool retryable = res->status == 429 || res->status >= 500;
    throw BackendError("endpoint returned HTTP " + std::to_string(res->status),
                       retryable);
  }
  return parse_response_body(res->body);
}

}  // namespace knowcat
