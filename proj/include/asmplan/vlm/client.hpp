#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "asmplan/error.hpp"
#include "asmplan/vlm/hashing.hpp"
#include "asmplan/vlm/types.hpp"

namespace asmplan::vlm {

/// Endpoint or transport failure. Transient ones are worth retrying.
class ClientError : public Error {
 public:
  ClientError(const std::string& what, bool transient) : Error(what), transient_(transient) {}
  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

/// A replayed request differs from the recorded one.
class ReplayMismatch : public Error {
 public:
  using Error::Error;
};

class VlmClient {
 public:
  virtual ~VlmClient() = default;
  virtual VlmResponse complete(const VlmRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Transcripts: JSON lines, one record per exchange. Images are stored as
// content hashes; the bytes can go to a blob directory keyed by hash.

struct ImageDigest {
  std::string file;  // file name only, informational
  std::string sha256;

  bool operator==(const ImageDigest&) const = default;
};

struct TranscriptRecord {
  std::size_t seq = 0;
  std::size_t run = 0;
  int prompt_id = 0;
  std::string model;
  double temperature = 0.0;
  std::vector<ImageDigest> images;
  std::string text;
  std::string text_sha256;
  VlmResponse response;
};

inline std::vector<ImageDigest> digest_images(const std::vector<ImageRef>& images) {
  std::vector<ImageDigest> out;
  for (const auto& im : images) out.push_back({im.path.filename().string(), sha256_file(im.path)});
  return out;
}

inline TranscriptRecord make_record(const VlmRequest& req, const VlmResponse& resp) {
  TranscriptRecord r;
  r.prompt_id = req.prompt_id;
  r.model = req.model;
  r.temperature = req.temperature;
  r.images = digest_images(req.images);
  r.text = req.text;
  r.text_sha256 = sha256_hex(req.text);
  r.response = resp;
  return r;
}

inline nlohmann::json record_to_json(const TranscriptRecord& r) {
  nlohmann::json images = nlohmann::json::array();
  for (const auto& d : r.images) images.push_back({{"file", d.file}, {"sha256", d.sha256}});
  return {{"seq", r.seq},
          {"run", r.run},
          {"prompt", r.prompt_id},
          {"model", r.model},
          {"temperature", r.temperature},
          {"images", images},
          {"text_sha256", r.text_sha256},
          {"text", r.text},
          {"response", {{"text", r.response.text}, {"usage", r.response.usage}, {"latency_ms", r.response.latency_ms}}}};
}

inline TranscriptRecord record_from_json(const nlohmann::json& j) {
  try {
    TranscriptRecord r;
    r.seq = j.at("seq").get<std::size_t>();
    r.run = j.value("run", std::size_t{0});
    r.prompt_id = j.at("prompt").get<int>();
    r.model = j.value("model", std::string{});
    r.temperature = j.value("temperature", 0.0);
    for (const auto& d : j.at("images")) r.images.push_back({d.value("file", std::string{}), d.at("sha256").get<std::string>()});
    r.text = j.value("text", std::string{});
    r.text_sha256 = j.at("text_sha256").get<std::string>();
    const auto& resp = j.at("response");
    r.response.text = resp.at("text").get<std::string>();
    r.response.usage = resp.value("usage", nlohmann::json::object());
    r.response.latency_ms = resp.value("latency_ms", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad transcript record: ") + e.what());
  }
}

inline void write_transcript(const std::filesystem::path& path, const std::vector<TranscriptRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write transcript " + path.string());
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

inline std::vector<TranscriptRecord> read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read transcript " + path.string());
  std::vector<TranscriptRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(path.string() + ":" + std::to_string(n) + ": not JSON");
    out.push_back(record_from_json(j));
  }
  return out;
}

/// Copies image bytes to dir/<sha256>; existing blobs are left alone.
inline void store_blobs(const std::vector<ImageRef>& images, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& im : images) {
    const auto bytes = read_bytes(im.path);
    const auto target = dir / sha256_hex(bytes);
    if (std::filesystem::exists(target)) continue;
    std::ofstream(target, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
}

// ---------------------------------------------------------------------------

/// Returns canned responses in order and keeps the requests it saw.
class ScriptedClient : public VlmClient {
 public:
  explicit ScriptedClient(std::vector<std::string> responses) : responses_(responses.begin(), responses.end()) {}

  VlmResponse complete(const VlmRequest& request) override {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    if (responses_.empty()) throw ClientError("scripted client has no response left", false);
    VlmResponse r;
    r.text = std::move(responses_.front());
    responses_.pop_front();
    return r;
  }

  const std::vector<VlmRequest>& requests() const { return requests_; }

 private:
  std::mutex mutex_;
  std::deque<std::string> responses_;
  std::vector<VlmRequest> requests_;
};

/// Serves a recorded transcript. Each request must match the next record's
/// prompt id, text hash and image hashes.
class ReplayClient : public VlmClient {
 public:
  explicit ReplayClient(std::vector<TranscriptRecord> records) : records_(std::move(records)) {}

  VlmResponse complete(const VlmRequest& request) override {
    std::lock_guard lock(mutex_);
    if (next_ >= records_.size()) throw ReplayMismatch("transcript exhausted after " + std::to_string(next_) + " records");
    const auto& r = records_[next_];
    const std::string where = "transcript record " + std::to_string(r.seq) + ": ";
    if (r.prompt_id != request.prompt_id)
      throw ReplayMismatch(where + "expected prompt " + std::to_string(r.prompt_id) + ", got " + std::to_string(request.prompt_id));
    if (r.text_sha256 != sha256_hex(request.text)) throw ReplayMismatch(where + "prompt text differs");
    const auto images = digest_images(request.images);
    if (images.size() != r.images.size()) throw ReplayMismatch(where + "image count differs");
    for (std::size_t i = 0; i < images.size(); ++i)
      if (images[i].sha256 != r.images[i].sha256) throw ReplayMismatch(where + "image " + std::to_string(i) + " differs");
    ++next_;
    return r.response;
  }

  std::size_t consumed() const { return next_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::mutex mutex_;
  std::vector<TranscriptRecord> records_;
  std::size_t next_ = 0;
};

struct RetryPolicy {
  std::size_t max_attempts = 3;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
};

/// Retries transient ClientErrors with exponential backoff, then rethrows.
class RetryingClient : public VlmClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  RetryingClient(VlmClient& inner, RetryPolicy policy = {},
                 Sleeper sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })
      : inner_(inner), policy_(policy), sleep_(std::move(sleep)) {
    if (policy_.max_attempts == 0) throw InvalidArgument("retry policy needs at least one attempt");
  }

  VlmResponse complete(const VlmRequest& request) override {
    auto delay = policy_.initial_delay;
    for (std::size_t attempt = 1;; ++attempt) {
      try {
        return inner_.complete(request);
      } catch (const ClientError& e) {
        if (!e.transient() || attempt >= policy_.max_attempts) throw;
      }
      sleep_(delay);
      delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * policy_.multiplier));
    }
  }

 private:
  VlmClient& inner_;
  RetryPolicy policy_;
  Sleeper sleep_;
};

}  // namespace asmplan::vlm
