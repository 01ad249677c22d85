#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spio/types.hpp"

namespace spio {

struct GenerationRequest {
  std::string step_label;
  std::string prompt;
  double temperature = 0.5;
  double top_p = 1.0;
  int max_tokens = 4096;

  void validate() const;
};

struct GenerationResponse {
  std::string text;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
};

// One canned reply. Token counts left empty are estimated from text length.
struct ScriptedFixture {
  std::optional<std::string> expected_prompt_digest;  // sha256 hex of the prompt
  std::string response_text;
  std::optional<std::uint64_t> input_tokens;
  std::optional<std::uint64_t> output_tokens;
};

enum class ProviderKind { kHttpChat, kScripted };
std::string_view provider_kind_name(ProviderKind k);
ProviderKind parse_provider_kind(std::string_view name);

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kScripted;
  std::string endpoint;  // http_chat only
  std::string model_name;
  std::string api_key_env;
  double request_timeout_s = 120.0;
  int max_retries = 3;
  double backoff_initial_s = 1.0;  // doubles after each failed try
  std::optional<std::uint64_t> token_budget;
  std::vector<ScriptedFixture> fixtures;  // scripted only
};

ProviderConfig scripted_provider(std::vector<ScriptedFixture> fixtures);

std::string sha256_hex(std::string_view data);
// ceil(chars / 4), used when a provider does not report usage.
std::uint64_t estimate_tokens(std::string_view text);

// Minimal HTTP POST seam so the chat backend can be exercised without a
// network. Throws TransportError for connection-level failures.
struct HttpReply {
  int status = 0;
  std::string body;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpReply post(const std::string& url, const std::map<std::string, std::string>& headers,
                         const std::string& body, double timeout_s) = 0;
};

std::unique_ptr<HttpTransport> make_http_transport();

// Builds the chat-completion request body sent on the wire.
std::string chat_payload(const GenerationRequest& request, const ProviderConfig& provider);

// Text generation front door. Records every completed call in the run ledger
// and optionally mirrors request/response transcripts to disk.
class Gateway {
 public:
  explicit Gateway(ProviderConfig config, std::optional<std::filesystem::path> transcript_dir = {});
  Gateway(ProviderConfig config, std::unique_ptr<HttpTransport> transport,
          std::optional<std::filesystem::path> transcript_dir = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  GenerationResponse complete(const GenerationRequest& request, RunLedger& run);

  const ProviderConfig& config() const { return config_; }
  bool is_scripted() const { return config_.kind == ProviderKind::kScripted; }
  std::size_t fixtures_consumed() const;

  // Replaces the sleep used between retries (tests).
  void set_sleeper(std::function<void(std::chrono::duration<double>)> sleeper);

 private:
  GenerationResponse scripted(const GenerationRequest& request);
  GenerationResponse http_chat(const GenerationRequest& request);
  void mirror_transcript(std::uint64_t seq, const GenerationRequest& request,
                         const GenerationResponse& response) const;

  ProviderConfig config_;
  std::unique_ptr<HttpTransport> transport_;
  std::optional<std::filesystem::path> transcript_dir_;
  std::function<void(std::chrono::duration<double>)> sleeper_;
  mutable std::mutex fixture_mu_;
  std::size_t next_fixture_ = 0;
};

// Free-function form of Gateway::complete.
GenerationResponse complete(const GenerationRequest& request, Gateway& gateway, RunLedger& run);

struct UsageRow {
  std::string step_label;  // "total" for the grand-total row
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::uint64_t total_tokens = 0;
  bool operator==(const UsageRow&) const = default;
};

// One row per distinct step label in first-occurrence order, then the total.
std::vector<UsageRow> usage_report(const RunLedger& run);

}  // namespace spio
