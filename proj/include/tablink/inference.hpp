#pragma once

#include <memory>
#include <semaphore>
#include <string>

#include "tablink/document.hpp"
#include "tablink/options.hpp"

namespace tablink {

// Remote inference transport. Implementations must be safe to call from
// several threads at once.
class InferenceClient {
public:
    virtual ~InferenceClient() = default;

    // Sends one UTF-8 JSON request body and returns the raw response body.
    // Throws TransportError when no usable response arrived.
    virtual std::string exchange(const std::string& request_body) = 0;
};

// Calls `client` up to `max_attempts` times; throws BackendUnavailable
// once every attempt failed with a TransportError.
std::string exchange_with_retry(InferenceClient& client, const std::string& request_body, int max_attempts);

// POSTs request bodies to an http(s) endpoint with an optional bearer
// token. At most `max_in_flight` requests run concurrently.
class HttpInferenceClient final : public InferenceClient {
public:
    HttpInferenceClient(const std::string& endpoint, std::string token, int timeout_ms, int max_in_flight);

    std::string exchange(const std::string& request_body) override;

private:
    std::string origin_;
    std::string path_;
    std::string token_;
    int timeout_ms_;
    std::counting_semaphore<1024> slots_;
};

// nullptr when no endpoint is configured.
std::unique_ptr<InferenceClient> make_inference_client(const RemoteSettings& settings);

// Grid serialization sent to the backend as "table_context".
std::string table_context_json(const Table& table);

}  // namespace tablink
