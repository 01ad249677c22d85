#include <cmath>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "spio/error.hpp"
#include "spio/pca.hpp"
#include "spio/text_util.hpp"

namespace spio {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ < 2) fail(ErrorCode::kInvalidArgument, "embedding dimension must be >= 2");
}

std::vector<double> HashingEmbedder::embed(std::string_view text) {
  std::vector<double> v(dimension_, 0.0);
  for (const auto& token : word_tokens(text)) {
    const std::uint64_t h = fnv1a(token);
    v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
  }
  double n = 0.0;
  for (double x : v) n += x * x;
  if (n > 0) {
    n = std::sqrt(n);
    for (double& x : v) x /= n;
  }
  return v;
}

HttpEmbedder::HttpEmbedder(std::string endpoint, std::string model, std::string api_key_env,
                           std::unique_ptr<HttpTransport> transport, double timeout_s)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      api_key_env_(std::move(api_key_env)),
      transport_(transport ? std::move(transport) : make_http_transport()),
      timeout_s_(timeout_s) {
  if (endpoint_.empty()) fail(ErrorCode::kConfigError, "embedding endpoint is empty");
}

std::vector<double> HttpEmbedder::embed(std::string_view text) {
  std::map<std::string, std::string> headers{{"Content-Type", "application/json"}};
  if (!api_key_env_.empty()) {
    if (const char* key = std::getenv(api_key_env_.c_str()); key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const nlohmann::ordered_json body{{"model", model_}, {"input", std::string(text)}};
  HttpReply reply;
  try {
    reply = transport_->post(endpoint_, headers, body.dump(), timeout_s_);
  } catch (const TransportError& e) {
    fail(ErrorCode::kProviderUnreachable, std::string("embedding endpoint: ") + e.what());
  }
  if (reply.status < 200 || reply.status >= 300) {
    fail(ErrorCode::kProviderUnreachable, "embedding endpoint answered HTTP " + std::to_string(reply.status));
  }
  try {
    const auto doc = nlohmann::json::parse(reply.body);
    return doc.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kProviderUnreachable, std::string("unreadable embedding response: ") + e.what());
  }
}

std::vector<EmbeddingVector> embed_plans(const std::vector<CandidatePlan>& plans, Embedder& embedder) {
  std::vector<EmbeddingVector> out;
  for (const auto& p : plans) {
    auto v = embedder.embed(p.plan_text);
    if (!out.empty() && v.size() != out.front().components.size()) {
      fail(ErrorCode::kDimensionMismatch, "embedder returned vectors of different lengths");
    }
    out.push_back(EmbeddingVector{PlanRef{p.stage, p.ordinal}, std::move(v)});
  }
  return out;
}

std::string plan_pca_tsv(const std::vector<CandidatePlan>& plans, Embedder& embedder) {
  std::ostringstream out;
  out << "stage\tordinal\tx\ty\n";
  if (plans.size() < 3) return out.str();
  const auto embedded = embed_plans(plans, embedder);
  std::vector<std::vector<double>> vectors;
  for (const auto& e : embedded) vectors.push_back(e.components);
  PcaResult pca;
  try {
    pca = pca_project(vectors);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateBatch) throw;
    return out.str();
  }
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    out << stage_name(embedded[i].plan_ref.stage) << "\t" << embedded[i].plan_ref.ordinal << "\t"
        << format_fixed6(pca.points[i][0]) << "\t" << format_fixed6(pca.points[i][1]) << "\n";
  }
  return out.str();
}

}  // namespace spio
