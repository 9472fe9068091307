#include "toolspin/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "toolspin/hash.hpp"

#include <httplib.h>

namespace toolspin {

namespace {

// Secondary hash seed so (key, digest) pairs behave like a 128-bit key.
constexpr uint64_t DIGEST_SEED = 0x6a09e667f3bcc908ULL;

std::string env_or_empty(const char * name) {
    const char * value = std::getenv(name);
    return value ? value : "";
}

mock_kind parse_mock_kind(const std::string & name) {
    if (name == "first_slot") return mock_kind::first_slot;
    if (name == "marker_match") return mock_kind::marker_match;
    if (name == "longest_description") return mock_kind::longest_description;
    if (name == "seeded_random") return mock_kind::seeded_random;
    if (name == "abstain") return mock_kind::abstain;
    throw gateway_error("unknown mock policy '" + name +
                        "' (known: first_slot, marker_match, longest_description, seeded_random, abstain)");
}

std::vector<std::string> split(const std::string & text, char sep) {
    std::vector<std::string> parts;
    size_t begin = 0;
    while (true) {
        size_t end = text.find(sep, begin);
        if (end == std::string::npos) {
            parts.push_back(text.substr(begin));
            return parts;
        }
        parts.push_back(text.substr(begin, end - begin));
        begin = end + 1;
    }
}

// Correct arguments for a sample, read off the ground truth: every required
// parameter gets its first concrete acceptable value; omittable optionals
// are left out.
json synthesize_correct_args(const sample & s) {
    json args = json::object();
    for (const auto & [name, schema] : s.tool.params.properties) {
        (void)schema;
        const auto * acceptable = s.truth.find(name);
        if (!acceptable || acceptable->empty()) continue;
        const bool required = s.tool.params.is_required(name);
        bool omittable = false;
        for (const auto & v : *acceptable) {
            if (v.is_string() && v.get<std::string>().empty()) {
                omittable = true;
                break;
            }
        }
        if (!required && omittable) continue;
        for (const auto & v : *acceptable) {
            if (v.is_string() && v.get<std::string>().empty()) continue;
            args[name] = v;
            break;
        }
    }
    return args;
}

constexpr uint64_t ARG_COIN_SEED = 0x517cc1b727220a95ULL;

json synthesize_args(const sample & s, mock_arg_mode mode, uint64_t request_hash) {
    bool correct = true;
    switch (mode) {
        case mock_arg_mode::always_correct: correct = true; break;
        case mock_arg_mode::always_wrong:   correct = false; break;
        case mock_arg_mode::mixed:          correct = (mix64(request_hash ^ ARG_COIN_SEED) & 1) == 0; break;
    }
    json args = synthesize_correct_args(s);
    if (!correct) {
        args["__unexpected"] = true; // outside the schema, so never acceptable
    }
    return args;
}

// Mock decisions are pure functions of the request, like a temperature-0
// model: two cases that serialize to the same request body get the same
// answer, which keeps cache replay and live runs indistinguishable.
model_response mock_invoke(const model_handle & handle, const test_case & tc, uint64_t request_hash) {
    const mock_policy & policy = handle.policy;
    model_response r;
    r.finish_reason = "tool_calls";

    int slot = -1;
    switch (policy.kind) {
        case mock_kind::first_slot:
            slot = 0;
            break;
        case mock_kind::marker_match: {
            const bool in_first = tc.slots[0].description_text.find(policy.marker) != std::string::npos;
            const bool in_second = tc.slots[1].description_text.find(policy.marker) != std::string::npos;
            slot = in_first ? 0 : in_second ? 1 : -1;
            break;
        }
        case mock_kind::longest_description:
            slot = tc.slots[1].description_text.size() > tc.slots[0].description_text.size() ? 1 : 0;
            break;
        case mock_kind::seeded_random:
            slot = static_cast<int>(mix64(policy.seed ^ request_hash) & 1);
            break;
        case mock_kind::abstain:
            slot = -1;
            break;
    }
    if (slot < 0) {
        r.raw_text = "I cannot help with that.";
        r.finish_reason = "stop";
        return r;
    }
    tool_call call;
    call.name = tc.slots[static_cast<size_t>(slot)].tool_name;
    call.arguments = synthesize_args(*tc.source, policy.arg_mode, request_hash);
    r.tool_calls.push_back(std::move(call));
    return r;
}

// Deterministic stand-in for the rewrite model: recognizes each prompt
// family from its query text and transforms the embedded description.
std::string mock_chat(const std::string & user) {
    auto after_blank_line = [&](size_t from) {
        size_t pos = user.find("\n\n", from);
        return pos == std::string::npos ? std::string() : user.substr(pos + 2);
    };
    if (user.rfind("Add examples", 0) == 0) {
        std::string tail = after_blank_line(0);
        const std::string name_marker = "The function name is '";
        size_t name_pos = tail.find(name_marker);
        std::string func_name = "f";
        std::vector<std::string> params;
        if (name_pos != std::string::npos) {
            size_t name_end = tail.find('\'', name_pos + name_marker.size());
            func_name = tail.substr(name_pos + name_marker.size(),
                                    name_end - name_pos - name_marker.size());
            size_t list_begin = tail.find('[', name_end);
            size_t list_end = tail.find(']', list_begin);
            if (list_begin != std::string::npos && list_end != std::string::npos) {
                for (auto & part : split(tail.substr(list_begin + 1, list_end - list_begin - 1), ',')) {
                    size_t b = part.find_first_not_of(" '");
                    size_t e = part.find_last_not_of(" '");
                    if (b != std::string::npos) params.push_back(part.substr(b, e - b + 1));
                }
            }
        }
        std::string call = func_name + "(";
        for (size_t i = 0; i < params.size(); ++i) {
            if (i) call += ", ";
            call += params[i] + "=" + std::to_string(5 * (i + 1));
        }
        call += ")";
        return "Example: " + call + " returns the expected result.";
    }
    if (user.rfind("Expand", 0) == 0) {
        return after_blank_line(0) +
               " It validates its inputs, applies the documented operation, and returns the"
               " result in a consistent format. Inputs outside the documented ranges are"
               " rejected rather than silently coerced.";
    }
    if (user.rfind("Shorten", 0) == 0) {
        std::string desc = after_blank_line(0);
        size_t period = desc.find('.');
        return period == std::string::npos ? desc : desc.substr(0, period + 1);
    }
    if (user.rfind("Rewrite", 0) == 0) {
        std::string desc = after_blank_line(0);
        if (user.find("professional") != std::string::npos) {
            return "In formal terms: " + desc;
        }
        return "Put simply: " + desc;
    }
    if (user.rfind("Translate", 0) == 0) {
        const std::string into = " into ";
        size_t lang_begin = user.find(into);
        size_t lang_end = user.find(':', lang_begin);
        std::string lang = lang_begin == std::string::npos
            ? "Unknown"
            : user.substr(lang_begin + into.size(), lang_end - lang_begin - into.size());
        return "[" + lang + "] " + after_blank_line(0);
    }
    std::string tail = after_blank_line(0);
    return tail.empty() ? "OK." : tail;
}

struct endpoint_parts {
    std::string origin;      // scheme://host[:port]
    std::string path_prefix; // e.g. "/v1"
};

endpoint_parts split_endpoint(const std::string & endpoint) {
    size_t scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
        throw gateway_error("endpoint '" + endpoint + "' must include a scheme");
    }
    size_t path = endpoint.find('/', scheme + 3);
    endpoint_parts parts;
    if (path == std::string::npos) {
        parts.origin = endpoint;
    } else {
        parts.origin = endpoint.substr(0, path);
        parts.path_prefix = endpoint.substr(path);
        while (!parts.path_prefix.empty() && parts.path_prefix.back() == '/') {
            parts.path_prefix.pop_back();
        }
    }
    return parts;
}

bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

// POST with bounded retries and exponential backoff; retries cover
// transport failures, 429 and 5xx only.
std::string http_post_json(const model_handle & handle, const std::string & path,
                           const std::string & body) {
    std::string endpoint = !handle.endpoint.empty() ? handle.endpoint : env_or_empty(ENV_API_BASE);
    if (endpoint.empty()) {
        throw gateway_error(std::string("no endpoint for model '") + handle.model_id +
                            "': set " + ENV_API_BASE + " or the handle endpoint");
    }
    endpoint_parts parts = split_endpoint(endpoint);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(15, 0);
    client.set_read_timeout(300, 0);
    httplib::Headers headers;
    std::string api_key = env_or_empty(ENV_API_KEY);
    if (!api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key);
    }

    int attempts = 0;
    std::string last_error;
    for (; attempts < handle.max_attempts; ++attempts) {
        if (attempts > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(
                static_cast<long long>(handle.backoff_ms) << (attempts - 1)));
        }
        auto res = client.Post(parts.path_prefix + path, headers, body, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (retryable_status(res->status)) {
            last_error = "http " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw gateway_error("http " + std::to_string(res->status) + " from " + endpoint +
                                ": " + res->body);
        }
        return res->body;
    }
    throw retry_exhausted_error("giving up on " + endpoint + " after " + std::to_string(attempts) +
                                " attempts (" + last_error + ")", attempts);
}

model_response parse_chat_completion(const std::string & body) {
    json payload;
    try {
        payload = json::parse(body);
    } catch (const json::exception & e) {
        throw provider_format_error(std::string("provider sent invalid json: ") + e.what(), body);
    }
    if (!payload.contains("choices") || !payload["choices"].is_array() || payload["choices"].empty()) {
        throw provider_format_error("provider response has no choices", body);
    }
    const json & choice = payload["choices"][0];
    if (!choice.contains("message")) {
        throw provider_format_error("provider choice has no message", body);
    }
    const json & message = choice["message"];

    model_response r;
    r.finish_reason = choice.value("finish_reason", "");
    if (message.contains("content") && message["content"].is_string()) {
        r.raw_text = message["content"].get<std::string>();
    }
    for (const auto & call : message.value("tool_calls", json::array())) {
        tool_call tc;
        const json & fn = call.value("function", json::object());
        tc.name = fn.value("name", "");
        const json & arguments = fn.contains("arguments") ? fn["arguments"] : json::object();
        if (arguments.is_string()) {
            try {
                tc.arguments = json::parse(arguments.get<std::string>());
            } catch (const json::exception &) {
                tc.arguments = json::object();
                r.warnings.push_back("unparseable arguments for call '" + tc.name + "'");
            }
        } else if (arguments.is_object()) {
            tc.arguments = arguments;
        }
        r.tool_calls.push_back(std::move(tc));
    }
    // Models served without a native tool API answer with call strings.
    if (r.tool_calls.empty() && r.raw_text && !r.raw_text->empty()) {
        r.tool_calls = parse_call_text(*r.raw_text, &r.warnings);
    }
    return r;
}

} // namespace

model_handle model_handle::parse(const std::string & uri) {
    model_handle handle;
    handle.model_id = uri;
    if (uri.rfind("mock:", 0) != 0) {
        handle.provider = provider_kind::http_openai_compat;
        return handle;
    }
    handle.provider = provider_kind::mock;
    auto parts = split(uri, ':');
    if (parts.size() < 2 || parts[1].empty()) {
        throw gateway_error("mock uri '" + uri + "' needs a policy kind, e.g. mock:first_slot");
    }
    handle.policy.kind = parse_mock_kind(parts[1]);

    std::vector<std::string> rest(parts.begin() + 2, parts.end());
    if (!rest.empty()) {
        const std::string & last = rest.back();
        if (last == "always_correct") { handle.policy.arg_mode = mock_arg_mode::always_correct; rest.pop_back(); }
        else if (last == "always_wrong") { handle.policy.arg_mode = mock_arg_mode::always_wrong; rest.pop_back(); }
        else if (last == "mixed") { handle.policy.arg_mode = mock_arg_mode::mixed; rest.pop_back(); }
    }
    std::string param;
    for (const auto & piece : rest) {
        param += param.empty() ? piece : ":" + piece; // markers may contain ':'
    }
    switch (handle.policy.kind) {
        case mock_kind::marker_match:
            if (param.empty()) {
                throw gateway_error("mock:marker_match needs a marker, e.g. mock:marker_match:most effective");
            }
            handle.policy.marker = param;
            break;
        case mock_kind::seeded_random:
            handle.policy.seed = param.empty() ? 0 : std::strtoull(param.c_str(), nullptr, 10);
            break;
        default:
            if (!param.empty()) {
                throw gateway_error("mock policy '" + parts[1] + "' takes no parameter, got '" + param + "'");
            }
            break;
    }
    return handle;
}

response_cache::response_cache(const std::filesystem::path & path) : path_(path) {
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    std::ifstream file(path_);
    if (file.is_open()) {
        std::string line;
        while (std::getline(file, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                json record = json::parse(line);
                uint64_t key = from_hex64(record.at("key").get<std::string>());
                uint64_t digest = from_hex64(record.at("digest").get<std::string>());
                entries_[{key, digest}] = model_response::from_json(record.at("response"));
            } catch (const std::exception &) {
                // Torn record from an interrupted run; drop it.
                continue;
            }
        }
    }
}

std::optional<model_response> response_cache::find(uint64_t key, uint64_t digest) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find({key, digest});
    if (it == entries_.end()) return std::nullopt;
    model_response r = it->second;
    r.cached = true;
    return r;
}

void response_cache::store(uint64_t key, uint64_t digest, const model_response & response) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = entries_.insert_or_assign(std::make_pair(key, digest), response);
    (void)it;
    if (!inserted) return; // already logged
    std::ofstream file(path_, std::ios::app);
    if (!file.is_open()) {
        throw gateway_error("cannot append to cache " + path_.string());
    }
    json record = {
        {"key", to_hex64(key)},
        {"digest", to_hex64(digest)},
        {"response", response.to_json()},
    };
    file << record.dump() << "\n";
    file.flush();
}

size_t response_cache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

json build_request_body(const model_handle & handle, const test_case & tc) {
    json tools = json::array();
    for (const auto & slot : tc.slots) {
        tools.push_back({
            {"type", "function"},
            {"function", {
                {"name", slot.tool_name},
                {"description", slot.description_text},
                {"parameters", tc.source->tool.params.to_json()},
            }},
        });
    }
    json body = {
        {"model", handle.model_id},
        {"messages", json::array({json{{"role", "user"}, {"content", tc.source->query}}})},
        {"tools", tools},
        {"temperature", handle.params.temperature},
        {"tool_choice", handle.params.tool_choice},
    };
    if (handle.params.max_tokens > 0) {
        body["max_tokens"] = handle.params.max_tokens;
    }
    return body;
}

std::pair<uint64_t, uint64_t> cache_key(const model_handle & handle, const test_case & tc) {
    const std::string canonical = build_request_body(handle, tc).dump();
    return {fnv1a64(canonical), fnv1a64(canonical, DIGEST_SEED)};
}

model_response invoke(const model_handle & handle, const test_case & tc, response_cache * cache) {
    auto [key, digest] = cache_key(handle, tc);
    if (cache) {
        if (auto hit = cache->find(key, digest)) {
            return *hit;
        }
    }
    model_response response;
    const auto started = std::chrono::steady_clock::now();
    if (handle.provider == provider_kind::mock) {
        response = mock_invoke(handle, tc, key);
    } else {
        const std::string body = build_request_body(handle, tc).dump();
        response = parse_chat_completion(http_post_json(handle, "/chat/completions", body));
    }
    response.latency_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started).count());
    if (cache) {
        cache->store(key, digest, response);
    }
    return response;
}

std::string chat_complete(const model_handle & handle, const std::string & system,
                          const std::string & user, response_cache * cache) {
    json body = {
        {"model", handle.model_id},
        {"messages", json::array({
            json{{"role", "system"}, {"content", system}},
            json{{"role", "user"}, {"content", user}},
        })},
        {"temperature", handle.params.temperature},
    };
    if (handle.params.max_tokens > 0) {
        body["max_tokens"] = handle.params.max_tokens;
    }
    const std::string canonical = body.dump();
    const uint64_t key = fnv1a64(canonical);
    const uint64_t digest = fnv1a64(canonical, DIGEST_SEED);
    if (cache) {
        if (auto hit = cache->find(key, digest)) {
            return hit->raw_text.value_or("");
        }
    }
    model_response response;
    if (handle.provider == provider_kind::mock) {
        response.raw_text = mock_chat(user);
        response.finish_reason = "stop";
    } else {
        response = parse_chat_completion(http_post_json(handle, "/chat/completions", canonical));
        if (!response.raw_text) {
            throw provider_format_error("chat completion returned no content", "");
        }
    }
    if (cache) {
        cache->store(key, digest, response);
    }
    return response.raw_text.value_or("");
}

} // namespace toolspin
