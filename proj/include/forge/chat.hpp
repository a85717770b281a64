#pragma once

#include "forge/action.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace forge {

/// Connection settings for one chat-completion endpoint. A base_url with the
/// mock:// scheme selects a built-in deterministic client instead of HTTP
/// ("mock://echo" or "mock://none").
struct ChatEndpoint {
    std::string base_url;
    std::string model_name;
    std::string api_key_env;
    double temperature = 1.0;
    int max_retries = 3;
    std::chrono::milliseconds timeout{30000};
};

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 1.0;
};

class ChatClient {
  public:
    virtual ~ChatClient() = default;
    /// Returns the assistant message content; throws EndpointError once the
    /// retry budget is exhausted.
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Blocking client for OpenAI-style POST /v1/chat/completions endpoints with
/// exponential-backoff retries on transport errors, 429 and 5xx.
class HttpChatClient : public ChatClient {
  public:
    explicit HttpChatClient(ChatEndpoint endpoint);
    std::string complete(const ChatRequest& request) override;

    static Json request_body(const ChatRequest& request);

  private:
    ChatEndpoint endpoint_;
    std::string host_;
    std::string path_prefix_;
};

/// Scripted client that records every request it sees; the backbone of the
/// consensus-pipeline tests.
class MockChatClient : public ChatClient {
  public:
    using Handler = std::function<std::string(const ChatRequest&)>;
    explicit MockChatClient(Handler handler) : handler_(std::move(handler)) {}

    std::string complete(const ChatRequest& request) override;
    std::vector<ChatRequest> recorded() const;

  private:
    Handler handler_;
    mutable std::mutex mutex_;
    std::vector<ChatRequest> requests_;
};

/// Deterministic mock pair used by the synthesis pipeline: the generator
/// variant derives an instruction from the target element id it finds in the
/// prompt, the verifier variant re-derives the id from the instruction alone
/// ("echo") or always answers None ("none").
std::string mock_chat_behavior(const std::string& scheme, const ChatRequest& request);

/// mock:// endpoints get a MockChatClient, anything else an HttpChatClient.
std::unique_ptr<ChatClient> make_chat_client(const ChatEndpoint& endpoint);

} // namespace forge
