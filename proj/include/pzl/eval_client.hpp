#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "pzl/eval.hpp"
#include "pzl/sample.hpp"

namespace pzl {

struct ModelEndpoint {
  std::string base_url;  // e.g. "http://localhost:8000/v1"
  std::string model;
  std::string token_env = "MODEL_API_KEY";  // bearer token source; empty = no auth header
  int timeout_seconds = 120;
  int max_concurrency = 4;
  int max_attempts = 3;
  int backoff_ms = 500;
  int max_tokens = 256;
};

namespace netdetail {

inline std::string base64_encode(const std::uint8_t* data, std::size_t len) {
  static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < len) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < len) chunk |= data[i + 2];
    out.push_back(alphabet[(chunk >> 18) & 63]);
    out.push_back(alphabet[(chunk >> 12) & 63]);
    out.push_back(i + 1 < len ? alphabet[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? alphabet[chunk & 63] : '=');
  }
  return out;
}

struct SplitUrl {
  std::string host_origin;  // scheme://host[:port]
  std::string path_prefix;  // path without trailing slash
};

inline SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint URL needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.host_origin = url;
  } else {
    out.host_origin = url.substr(0, path_start);
    out.path_prefix = url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  }
  return out;
}

inline std::unique_ptr<httplib::Client> make_client(const ModelEndpoint& endpoint,
                                                    const SplitUrl& url) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.host_origin.rfind("https://", 0) == 0)
    throw std::runtime_error("this build lacks TLS support; use an http:// endpoint");
#endif
  auto client = std::make_unique<httplib::Client>(url.host_origin);
  client->set_connection_timeout(endpoint.timeout_seconds, 0);
  client->set_read_timeout(endpoint.timeout_seconds, 0);
  client->set_write_timeout(endpoint.timeout_seconds, 0);
  if (!endpoint.token_env.empty()) {
    const char* token = std::getenv(endpoint.token_env.c_str());
    if (token && *token) client->set_bearer_token_auth(token);
  }
  return client;
}

inline std::string data_url_for(const fs::path& image_path) {
  std::ifstream in(image_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read image: " + image_path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return "data:image/png;base64," + base64_encode(bytes.data(), bytes.size());
}

inline json chat_body(const ModelEndpoint& endpoint, const PromptPayload& prompt) {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", prompt.full_text()}});
  for (const auto& img : prompt.images)
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url_for(img)}}}});
  return json{{"model", endpoint.model},
              {"temperature", 0},
              {"max_tokens", endpoint.max_tokens},
              {"messages", json::array({json{{"role", "user"}, {"content", content}}})}};
}

inline std::string extract_assistant_text(const json& response) {
  const json& message = response.at("choices").at(0).at("message");
  const json& content = message.at("content");
  if (content.is_string()) return content.get<std::string>();
  if (content.is_array()) {
    std::string out;
    for (const auto& part : content)
      if (part.value("type", "text") == "text") out += part.value("text", "");
    return out;
  }
  throw std::runtime_error("unexpected message content shape");
}

inline bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace netdetail

struct QueryResult {
  std::string text;
  int retries = 0;
  double latency_ms = 0;
  std::string error;  // non-empty: permanently failed, scored as no response
};

// Single-turn chat-completion request with base64-embedded images at zero
// temperature. Transient transport errors retry with exponential backoff; a
// permanently failed request is recorded, never thrown.
inline QueryResult query_model(const ModelEndpoint& endpoint, const PromptPayload& prompt) {
  QueryResult result;
  const auto url = netdetail::split_url(endpoint.base_url);
  const json body = netdetail::chat_body(endpoint, prompt);
  const std::string body_str = body.dump();
  const auto t0 = std::chrono::steady_clock::now();

  for (int attempt = 0; attempt < std::max(1, endpoint.max_attempts); ++attempt) {
    if (attempt > 0) {
      result.retries = attempt;
      std::this_thread::sleep_for(std::chrono::milliseconds(endpoint.backoff_ms << (attempt - 1)));
    }
    auto client = netdetail::make_client(endpoint, url);
    const httplib::Result res =
        client->Post(url.path_prefix + "/chat/completions", body_str, "application/json");
    if (!res) {
      result.error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (netdetail::retryable_status(res->status)) {
      result.error = "http " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      result.error = "http " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      break;  // non-retryable
    }
    try {
      result.text = netdetail::extract_assistant_text(json::parse(res->body));
      result.error.clear();
      break;
    } catch (const std::exception& e) {
      result.error = std::string("bad response: ") + e.what();
      break;
    }
  }
  result.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// Minimal text-only request sent before a batch. Authentication failures are
// fatal here so a bad token cannot burn through a whole dataset.
inline void preflight(const ModelEndpoint& endpoint) {
  const auto url = netdetail::split_url(endpoint.base_url);
  auto client = netdetail::make_client(endpoint, url);
  const json body{{"model", endpoint.model},
                  {"temperature", 0},
                  {"max_tokens", 1},
                  {"messages", json::array({json{{"role", "user"}, {"content", "ping"}}})}};
  const httplib::Result res =
      client->Post(url.path_prefix + "/chat/completions", body.dump(), "application/json");
  if (!res) throw std::runtime_error("preflight failed: " + httplib::to_string(res.error()));
  if (res->status == 401 || res->status == 403)
    throw std::runtime_error("preflight authentication failed (http " + std::to_string(res->status) +
                             "); check the token in $" + endpoint.token_env);
  if (res->status != 200)
    throw std::runtime_error("preflight failed with http " + std::to_string(res->status) + ": " +
                             res->body.substr(0, 200));
}

// Evaluates every sample against the endpoint with bounded in-flight
// requests; records are returned in dataset order.
inline std::vector<EvalRecord> run_endpoint(const std::vector<PuzzleSample>& samples,
                                            const fs::path& dataset_root,
                                            const ModelEndpoint& endpoint, const std::string& mode_slug,
                                            const PromptTemplates& templates = PromptTemplates::defaults()) {
  preflight(endpoint);
  std::vector<EvalRecord> records(samples.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, endpoint.max_concurrency);

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= samples.size()) return;
      const PuzzleSample& s = samples[i];
      EvalRecord rec;
      rec.sample_id = s.id;
      rec.model = endpoint.model;
      rec.mode = mode_slug;
      try {
        const QueryResult q = query_model(endpoint, render_prompt(s, dataset_root, templates));
        rec.raw_response = q.text;
        rec.retries = q.retries;
        rec.latency_ms = q.latency_ms;
        rec.transport_error = q.error;
      } catch (const std::exception& e) {
        rec.transport_error = e.what();
      }
      records[i] = std::move(rec);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return records;
}

// Offline mode: raw responses pre-recorded per sample id
// (JSONL: {"id": ..., "raw_response": ...}). Missing ids score as no
// response.
inline std::vector<EvalRecord> run_responses_file(const std::vector<PuzzleSample>& samples,
                                                  const fs::path& responses_path,
                                                  const std::string& model_name,
                                                  const std::string& mode_slug) {
  std::ifstream in(responses_path);
  if (!in) throw std::runtime_error("responses file missing: " + responses_path.string());
  std::map<std::string, std::string> responses;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    responses[j.at("id").get<std::string>()] = j.at("raw_response").get<std::string>();
  }
  std::vector<EvalRecord> records;
  records.reserve(samples.size());
  for (const auto& s : samples) {
    EvalRecord rec;
    rec.sample_id = s.id;
    rec.model = model_name;
    rec.mode = mode_slug;
    auto it = responses.find(s.id);
    if (it == responses.end())
      rec.transport_error = "no recorded response";
    else
      rec.raw_response = it->second;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace pzl
