#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "toolspin/types.hpp"

namespace toolspin {

struct gateway_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Transport gave up after the configured number of attempts.
struct retry_exhausted_error : gateway_error {
    int attempts;
    retry_exhausted_error(const std::string & what, int attempts_)
        : gateway_error(what), attempts(attempts_) {}
};

// Provider answered with a payload we cannot interpret; raw body preserved.
struct provider_format_error : gateway_error {
    std::string raw_body;
    provider_format_error(const std::string & what, std::string body)
        : gateway_error(what), raw_body(std::move(body)) {}
};

enum class provider_kind { http_openai_compat, mock };

enum class mock_kind { first_slot, marker_match, longest_description, seeded_random, abstain };
enum class mock_arg_mode { always_correct, always_wrong, mixed };

struct mock_policy {
    mock_kind kind = mock_kind::first_slot;
    std::string marker;   // marker_match only
    uint64_t seed = 0;    // seeded_random only
    mock_arg_mode arg_mode = mock_arg_mode::always_correct;
};

struct request_params {
    double temperature = 0.0;
    int max_tokens = 0; // 0 = provider default
    std::string tool_choice = "auto";
};

struct model_handle {
    std::string model_id;
    provider_kind provider = provider_kind::mock;
    std::string endpoint;    // http provider; empty = TOOLSPIN_API_BASE
    mock_policy policy;      // mock provider
    request_params params;
    int max_attempts = 3;
    int backoff_ms = 1000;   // doubles per retry

    // "mock:<kind>[:<param>][:<arg_mode>]" or a plain model name (http).
    static model_handle parse(const std::string & uri);
};

// Append-only response log keyed by content hash. Interrupted runs resume
// from whatever made it to disk; a torn trailing record is dropped on load.
class response_cache {
public:
    explicit response_cache(const std::filesystem::path & path);

    std::optional<model_response> find(uint64_t key, uint64_t digest) const;
    void store(uint64_t key, uint64_t digest, const model_response & response);
    size_t size() const;
    const std::filesystem::path & path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::map<std::pair<uint64_t, uint64_t>, model_response> entries_;
};

// Canonical request body for a test case: messages + the two tool slots in
// roster order. Shared by the wire protocol, the cache key and the mocks.
json build_request_body(const model_handle & handle, const test_case & tc);
std::pair<uint64_t, uint64_t> cache_key(const model_handle & handle, const test_case & tc);

// Queries the model for one test case, going through the cache when one is
// supplied. Safe for bounded concurrent use.
model_response invoke(const model_handle & handle, const test_case & tc,
                      response_cache * cache = nullptr);

// Plain chat completion (no tools); used by the freeze step. The mock
// provider answers with deterministic rewrites derived from the request.
std::string chat_complete(const model_handle & handle, const std::string & system,
                          const std::string & user, response_cache * cache = nullptr);

// Parses a bracketed call list like [f(a=1, b='x'), g()] with python-style
// literals. Total: unparseable input yields an empty list plus warnings.
std::vector<tool_call> parse_call_text(const std::string & raw,
                                       std::vector<std::string> * warnings = nullptr);

// Canonical printer for the same grammar; parse(print(calls)) == calls.
std::string print_call_text(const std::vector<tool_call> & calls);

// Environment variable names for the http provider.
constexpr const char * ENV_API_KEY = "TOOLSPIN_API_KEY";
constexpr const char * ENV_API_BASE = "TOOLSPIN_API_BASE";

} // namespace toolspin
