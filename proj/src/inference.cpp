#include "tablink/inference.hpp"

#include <algorithm>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

namespace tablink {

using nlohmann::json;

std::string exchange_with_retry(InferenceClient& client, const std::string& request_body, int max_attempts) {
    std::string last_error = "no attempt made";
    for (int attempt = 1; attempt <= std::max(1, max_attempts); ++attempt) {
        try {
            return client.exchange(request_body);
        } catch (const TransportError& e) {
            last_error = e.what();
            spdlog::warn("inference attempt {}/{} failed: {}", attempt, max_attempts, last_error);
        }
    }
    throw BackendUnavailable("inference backend unavailable after " + std::to_string(max_attempts) +
                             " attempts: " + last_error);
}

HttpInferenceClient::HttpInferenceClient(const std::string& endpoint, std::string token, int timeout_ms,
                                         int max_in_flight)
    : token_(std::move(token)),
      timeout_ms_(timeout_ms),
      slots_(std::clamp(max_in_flight, 1, 1024)) {
    const std::size_t scheme = endpoint.find("://");
    const std::size_t path_start = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        origin_ = endpoint;
        path_ = "/";
    } else {
        origin_ = endpoint.substr(0, path_start);
        path_ = endpoint.substr(path_start);
    }
}

std::string HttpInferenceClient::exchange(const std::string& request_body) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{slots_};

    httplib::Client cli(origin_);
    const auto timeout = std::chrono::milliseconds(timeout_ms_);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

    auto res = cli.Post(path_, headers, request_body, "application/json");
    if (!res) throw TransportError("request to " + origin_ + path_ + " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("inference endpoint answered HTTP " + std::to_string(res->status));
    }
    return res->body;
}

std::unique_ptr<InferenceClient> make_inference_client(const RemoteSettings& settings) {
    if (settings.endpoint.empty()) return nullptr;
    return std::make_unique<HttpInferenceClient>(settings.endpoint, settings.token, settings.timeout_ms,
                                                 settings.max_in_flight);
}

std::string table_context_json(const Table& table) {
    json cells = json::array();
    for (const Cell& c : table.cells) {
        cells.push_back({{"id", c.id},
                         {"row", c.row},
                         {"col", c.col},
                         {"row_span", c.row_span},
                         {"col_span", c.col_span},
                         {"text", c.text}});
    }
    json j = {{"id", table.id},         {"number", table.number}, {"caption", table.caption},
              {"n_rows", table.n_rows}, {"n_cols", table.n_cols}, {"header_rows", table.header_rows},
              {"cells", std::move(cells)}};
    return j.dump();
}

}  // namespace tablink
