#include "forge/chat.hpp"

#include "forge/error.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <regex>
#include <thread>

namespace forge {
namespace {

constexpr const char* kCompletionsPath = "/v1/chat/completions";

bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

} // namespace

HttpChatClient::HttpChatClient(ChatEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    // Split "http://host:port/some/prefix" into client target and path prefix.
    const std::string& url = endpoint_.base_url;
    std::size_t scheme = url.find("://");
    std::size_t path_start =
        (scheme == std::string::npos) ? url.find('/') : url.find('/', scheme + 3);
    if (path_start == std::string::npos) {
        host_ = url;
    } else {
        host_ = url.substr(0, path_start);
        path_prefix_ = url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
}

Json HttpChatClient::request_body(const ChatRequest& request) {
    Json body;
    body["model"] = request.model;
    Json messages = Json::array();
    for (const ChatMessage& message : request.messages) {
        messages.push_back({{"role", message.role}, {"content", message.content}});
    }
    body["messages"] = std::move(messages);
    body["temperature"] = request.temperature;
    return body;
}

std::string HttpChatClient::complete(const ChatRequest& request) {
    httplib::Client client(host_);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
        endpoint_.timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(endpoint_.timeout));

    httplib::Headers headers;
    if (!endpoint_.api_key_env.empty()) {
        if (const char* key = std::getenv(endpoint_.api_key_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }

    const std::string path = path_prefix_ + kCompletionsPath;
    const std::string body = request_body(request).dump();

    std::string last_error;
    for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100) * (1 << (attempt - 1)));
        }
        httplib::Result result = client.Post(path, headers, body, "application/json");
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        if (retryable_status(result->status)) {
            last_error = "status " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200) {
            throw EndpointError("endpoint " + host_ + " returned status " +
                                std::to_string(result->status));
        }
        try {
            Json response = Json::parse(result->body);
            return response.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const Json::exception& e) {
            throw EndpointError(std::string("malformed completion response: ") + e.what());
        }
    }
    throw EndpointError("endpoint " + host_ + " failed after " +
                        std::to_string(endpoint_.max_retries + 1) + " attempts (" + last_error +
                        ")");
}

std::string MockChatClient::complete(const ChatRequest& request) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        requests_.push_back(request);
    }
    return handler_(request);
}

std::vector<ChatRequest> MockChatClient::recorded() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return requests_;
}

std::string mock_chat_behavior(const std::string& scheme, const ChatRequest& request) {
    std::string prompt;
    for (const ChatMessage& message : request.messages) {
        prompt += message.content;
        prompt += "\n";
    }

    const bool is_verifier = prompt.find("Target ID:") != std::string::npos;
    if (is_verifier) {
        if (scheme == "none") {
            return "Thought: nothing on this page matches.\nTarget ID: None";
        }
        std::smatch m;
        static const std::regex kNumbered(R"(numbered (\d+))");
        if (std::regex_search(prompt, m, kNumbered)) {
            return "Thought: the instruction names the element directly.\nTarget ID: " +
                   m[1].str();
        }
        return "Thought: the instruction is ambiguous.\nTarget ID: None";
    }

    // Generator: read the pre-selected target id out of the prompt context.
    std::smatch m;
    static const std::regex kTargetId(R"re(Target Element:[^\n]*\n?<[a-z0-9]+ id="(\d+)")re");
    if (!std::regex_search(prompt, m, kTargetId)) return "";
    const std::string id = m[1].str();
    if (prompt.find("Information Retrieval") != std::string::npos) {
        return "What is shown in the element numbered " + id + "?";
    }
    if (prompt.find("Reasoning Question") != std::string::npos) {
        return "Which element should I use here? The one numbered " + id + ".";
    }
    return "Click the element numbered " + id + ".";
}

std::unique_ptr<ChatClient> make_chat_client(const ChatEndpoint& endpoint) {
    constexpr std::string_view kMockScheme = "mock://";
    if (endpoint.base_url.rfind(kMockScheme, 0) == 0) {
        std::string scheme = endpoint.base_url.substr(kMockScheme.size());
        return std::make_unique<MockChatClient>(
            [scheme](const ChatRequest& request) { return mock_chat_behavior(scheme, request); });
    }
    return std::make_unique<HttpChatClient>(endpoint);
}

} // namespace forge
