#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "claimspot/model_io.hpp"
#include "claimspot/schema.hpp"
#include "json.hpp"

namespace claimspot {

struct SegmentResult {
  std::vector<std::string> sentences;
  std::string leftover;
};

/// Splits `carry + raw` after `.`, `!` or `?` when followed by whitespace and
/// an uppercase letter (optionally after an opening quote or bracket), or by
/// the end of the chunk. Known abbreviations ("Mr.", "U.K.", ...) never end a
/// sentence. Unterminated trailing text is returned as the leftover for the
/// next chunk. Whitespace runs collapse to one space; a space is inserted
/// between carry and raw when neither supplies one.
SegmentResult segment_transcript(std::string_view raw, std::string_view carry = {});

bool is_abbreviation(std::string_view word);

struct TranscriptSession {
  std::string id;
  std::string title;
  std::string created_at;
  std::int64_t next_seq = 0;
  std::string leftover;
};

struct FeedItem {
  std::int64_t seq = 0;
  Sentence sentence;
  BinaryLabel label = BinaryLabel::NonClaim;
  std::optional<double> probability;
  std::optional<ClaimCategory> category;
  bool manual_highlight = false;
};

/// Wire form: seq, id, text, label, probability, category (when present),
/// manual_highlight.
nlohmann::json to_wire(const FeedItem& item);
nlohmann::json to_wire(const TranscriptSession& session);

enum class ExportFilter { ModelClaims, ManualHighlights, Both };

ExportFilter export_filter_from_string(std::string_view s);

/// On-disk layout per session directory: `session.json` (metadata, rewritten
/// atomically), `feed.jsonl` (append-only item log) and `highlights.json`
/// (the current set of highlighted seqs, rewritten atomically).
class SessionStore {
 public:
  /// Creates the root if needed. Throws StoreUnavailable.
  explicit SessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::vector<std::string> session_ids() const;
  void write_session(const TranscriptSession& session);
  TranscriptSession read_session(const std::string& id) const;
  void append_items(const std::string& id, std::span<const FeedItem> items);
  std::vector<FeedItem> read_items(const std::string& id) const;
  void write_highlights(const std::string& id, const std::set<std::int64_t>& seqs);
  std::set<std::int64_t> read_highlights(const std::string& id) const;

  std::size_t highlight_writes() const { return highlight_writes_; }

 private:
  std::filesystem::path dir(const std::string& id) const { return root_ / id; }

  std::filesystem::path root_;
  std::size_t highlight_writes_ = 0;
};

/// The live transcript workflow: sessions receive raw text, complete
/// sentences are classified and appended to a seq-ordered feed, and
/// factcheckers toggle manual highlights.
class LiveService {
 public:
  /// `model` may be null (appends then fail with ModelNotLoaded).
  /// `category_model`, when given, must be multiclass and fills `category`.
  LiveService(std::filesystem::path store_root, std::shared_ptr<const TrainedModel> model,
              std::shared_ptr<const TrainedModel> category_model = nullptr, double threshold = 0.5);

  bool model_loaded() const { return model_ != nullptr; }
  double threshold() const { return threshold_; }

  /// Throws DuplicateSession when `id` is given and taken, StoreUnavailable.
  TranscriptSession create_session(const std::string& title, std::optional<std::string> id = std::nullopt);
  std::vector<TranscriptSession> list_sessions() const;
  /// Throws SessionNotFound, ModelNotLoaded.
  std::vector<FeedItem> append_text(const std::string& session_id, std::string_view raw);
  /// Items with seq > since, ascending.
  std::vector<FeedItem> get_feed(const std::string& session_id, std::int64_t since) const;
  /// Idempotent. Throws ItemNotFound.
  FeedItem set_highlight(const std::string& session_id, std::int64_t seq, bool value);
  /// TSV with header `seq text probability category manual_highlight`.
  std::string export_claims(const std::string& session_id, ExportFilter filter) const;

  const SessionStore& store() const { return store_; }

 private:
  struct SessionState {
    TranscriptSession meta;
    std::vector<FeedItem> items;
    mutable std::shared_mutex mutex;
  };

  SessionState& state(const std::string& id) const;
  std::string next_session_id() const;

  SessionStore store_;
  std::shared_ptr<const TrainedModel> model_;
  std::shared_ptr<const TrainedModel> category_model_;
  double threshold_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<SessionState>> sessions_;
};

/// JSON-over-HTTP front end for LiveService.
class HttpServer {
 public:
  explicit HttpServer(LiveService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace claimspot
