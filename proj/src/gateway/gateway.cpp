#include "spio/gateway.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <sstream>
#include <thread>

#include "spio/error.hpp"
#include "spio/text_util.hpp"

namespace spio {

std::string_view provider_kind_name(ProviderKind k) {
  return k == ProviderKind::kHttpChat ? "http_chat" : "scripted";
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "http_chat") return ProviderKind::kHttpChat;
  if (name == "scripted") return ProviderKind::kScripted;
  fail(ErrorCode::kConfigError, "unknown provider kind '" + std::string(name) + "'");
}

void GenerationRequest::validate() const {
  if (prompt.empty()) fail(ErrorCode::kInvalidArgument, "prompt is empty (" + step_label + ")");
  if (!(temperature >= 0.0)) fail(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) fail(ErrorCode::kInvalidArgument, "top_p must be in (0,1]");
  if (max_tokens <= 0) fail(ErrorCode::kInvalidArgument, "max_tokens must be positive");
}

ProviderConfig scripted_provider(std::vector<ScriptedFixture> fixtures) {
  if (fixtures.empty()) fail(ErrorCode::kInvalidArgument, "scripted provider needs fixtures");
  ProviderConfig config;
  config.kind = ProviderKind::kScripted;
  config.fixtures = std::move(fixtures);
  return config;
}

Gateway::Gateway(ProviderConfig config, std::optional<std::filesystem::path> transcript_dir)
    : Gateway(std::move(config), nullptr, std::move(transcript_dir)) {
  if (config_.kind == ProviderKind::kHttpChat) transport_ = make_http_transport();
}

Gateway::Gateway(ProviderConfig config, std::unique_ptr<HttpTransport> transport,
                 std::optional<std::filesystem::path> transcript_dir)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      transcript_dir_(std::move(transcript_dir)),
      sleeper_([](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); }) {}

Gateway::~Gateway() = default;

std::size_t Gateway::fixtures_consumed() const {
  std::lock_guard lock(fixture_mu_);
  return next_fixture_;
}

void Gateway::set_sleeper(std::function<void(std::chrono::duration<double>)> sleeper) {
  sleeper_ = std::move(sleeper);
}

GenerationResponse Gateway::complete(const GenerationRequest& request, RunLedger& run) {
  request.validate();
  if (config_.token_budget) {
    std::uint64_t used = 0;
    for (const auto& e : run.token_events()) used += e.input_tokens + e.output_tokens;
    if (used >= *config_.token_budget) {
      fail(ErrorCode::kTokenBudgetExceeded, std::to_string(used) + " tokens used, budget " +
                                                std::to_string(*config_.token_budget));
    }
  }
  GenerationResponse response =
      config_.kind == ProviderKind::kScripted ? scripted(request) : http_chat(request);
  if (trim(response.text).empty()) {
    fail(ErrorCode::kProviderRefusal, "empty output for step " + request.step_label);
  }
  const auto seq = run.record_tokens(request.step_label, response.input_tokens, response.output_tokens);
  mirror_transcript(seq, request, response);
  return response;
}

GenerationResponse Gateway::scripted(const GenerationRequest& request) {
  std::lock_guard lock(fixture_mu_);
  if (next_fixture_ >= config_.fixtures.size()) {
    fail(ErrorCode::kFixtureExhausted, "no fixture left for step " + request.step_label + " (" +
                                           std::to_string(config_.fixtures.size()) + " consumed)");
  }
  const ScriptedFixture& fixture = config_.fixtures[next_fixture_];
  if (fixture.expected_prompt_digest && *fixture.expected_prompt_digest != sha256_hex(request.prompt)) {
    fail(ErrorCode::kFixturePromptMismatch,
         "fixture " + std::to_string(next_fixture_) + " does not match prompt of step " +
             request.step_label);
  }
  ++next_fixture_;
  GenerationResponse response;
  response.text = fixture.response_text;
  response.input_tokens = fixture.input_tokens.value_or(estimate_tokens(request.prompt));
  response.output_tokens = fixture.output_tokens.value_or(estimate_tokens(fixture.response_text));
  return response;
}

void Gateway::mirror_transcript(std::uint64_t seq, const GenerationRequest& request,
                                const GenerationResponse& response) const {
  if (!transcript_dir_) return;
  std::string label = request.step_label;
  for (auto& c : label) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  std::ostringstream name;
  name << std::setw(4) << std::setfill('0') << seq << "-" << label << ".txt";
  std::ostringstream body;
  body << "step_label: " << request.step_label << "\n"
       << "temperature: " << format_double(request.temperature) << "\n"
       << "top_p: " << format_double(request.top_p) << "\n"
       << "max_tokens: " << request.max_tokens << "\n"
       << "input_tokens: " << response.input_tokens << "\n"
       << "output_tokens: " << response.output_tokens << "\n"
       << "--- prompt ---\n"
       << request.prompt << "\n"
       << "--- response ---\n"
       << response.text << "\n";
  write_file(*transcript_dir_ / name.str(), body.str());
}

GenerationResponse complete(const GenerationRequest& request, Gateway& gateway, RunLedger& run) {
  return gateway.complete(request, run);
}

std::vector<UsageRow> usage_report(const RunLedger& run) {
  std::vector<UsageRow> rows;
  UsageRow total{"total", 0, 0, 0};
  for (const auto& e : run.token_events()) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const UsageRow& r) { return r.step_label == e.step_label; });
    if (it == rows.end()) {
      rows.push_back({e.step_label, 0, 0, 0});
      it = std::prev(rows.end());
    }
    it->input_tokens += e.input_tokens;
    it->output_tokens += e.output_tokens;
    it->total_tokens += e.input_tokens + e.output_tokens;
    total.input_tokens += e.input_tokens;
    total.output_tokens += e.output_tokens;
    total.total_tokens += e.input_tokens + e.output_tokens;
  }
  rows.push_back(total);
  return rows;
}

}  // namespace spio
