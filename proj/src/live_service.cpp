#include "claimspot/service.hpp"

#include <chrono>
#include <mutex>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "claimspot/error.hpp"

namespace claimspot {

ExportFilter export_filter_from_string(std::string_view s) {
  if (s == "model_claims") return ExportFilter::ModelClaims;
  if (s == "manual_highlights") return ExportFilter::ManualHighlights;
  if (s == "both") return ExportFilter::Both;
  throw Error(ErrorCode::InvalidArgument,
              "unknown export filter '" + std::string(s) + "' (model_claims, manual_highlights, both)");
}

LiveService::LiveService(std::filesystem::path store_root, std::shared_ptr<const TrainedModel> model,
                         std::shared_ptr<const TrainedModel> category_model, double threshold)
    : store_(std::move(store_root)),
      model_(std::move(model)),
      category_model_(std::move(category_model)),
      threshold_(threshold) {
  for (const auto* m : {model_.get(), category_model_.get()}) {
    if (!m) continue;
    if (!m->pipeline) throw Error(ErrorCode::InvalidArgument, "model file carries no feature pipeline");
    if (m->pipeline->config().needs_sentence_ids()) {
      throw Error(ErrorCode::InvalidArgument,
                  "model features need per-sentence resources (" + m->pipeline->config().canonical() +
                      "); live text cannot be served");
    }
  }
  if (category_model_ && !category_model_->is_multiclass()) {
    throw Error(ErrorCode::InvalidArgument, "category model must be multiclass");
  }
  for (const auto& id : store_.session_ids()) {
    auto st = std::make_unique<SessionState>();
    st->meta = store_.read_session(id);
    st->items = store_.read_items(id);
    if (!st->items.empty()) st->meta.next_seq = std::max(st->meta.next_seq, st->items.back().seq + 1);
    for (auto seq : store_.read_highlights(id)) {
      if (seq >= 0 && seq < static_cast<std::int64_t>(st->items.size())) {
        st->items[static_cast<std::size_t>(seq)].manual_highlight = true;
      }
    }
    sessions_.emplace(id, std::move(st));
  }
  if (!sessions_.empty()) spdlog::info("restored {} session(s) from {}", sessions_.size(), store_.root().string());
}

LiveService::SessionState& LiveService::state(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::SessionNotFound, "session '" + id + "'");
  return *it->second;
}

std::string LiveService::next_session_id() const {
  for (std::size_t n = sessions_.size() + 1;; ++n) {
    auto id = fmt::format("session-{:04d}", n);
    if (!sessions_.contains(id)) return id;
  }
}

TranscriptSession LiveService::create_session(const std::string& title, std::optional<std::string> id) {
  std::unique_lock lock(sessions_mutex_);
  if (id) {
    if (id->empty() || id->find_first_of("/\\.") != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "session ids may not be empty or contain '/', '\\' or '.'");
    }
    if (sessions_.contains(*id)) throw Error(ErrorCode::DuplicateSession, "session '" + *id + "' exists");
  }
  auto st = std::make_unique<SessionState>();
  st->meta.id = id ? *id : next_session_id();
  st->meta.title = title;
  st->meta.created_at = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
  store_.write_session(st->meta);
  auto meta = st->meta;
  sessions_.emplace(meta.id, std::move(st));
  return meta;
}

std::vector<TranscriptSession> LiveService::list_sessions() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<TranscriptSession> out;
  for (const auto& [id, st] : sessions_) {
    std::shared_lock session_lock(st->mutex);
    out.push_back(st->meta);
  }
  return out;
}

std::vector<FeedItem> LiveService::append_text(const std::string& session_id, std::string_view raw) {
  auto& st = state(session_id);
  if (!model_) throw Error(ErrorCode::ModelNotLoaded, "no model loaded");
  std::unique_lock lock(st.mutex);
  auto segments = segment_transcript(raw, st.meta.leftover);

  std::vector<Sentence> sentences;
  std::int64_t seq = st.meta.next_seq;
  std::vector<std::string> recent;
  for (std::size_t i = st.items.size() >= 2 ? st.items.size() - 2 : 0; i < st.items.size(); ++i) {
    recent.push_back(st.items[i].sentence.text);
  }
  for (auto& text : segments.sentences) {
    Sentence s;
    s.id = fmt::format("{}-{}", session_id, seq);
    s.text = std::move(text);
    s.context = recent;
    s.source = "live:" + session_id;
    s.seq = seq++;
    recent.push_back(s.text);
    if (recent.size() > 2) recent.erase(recent.begin());
    sentences.push_back(std::move(s));
  }

  const auto predictions = classify_sentences(*model_, sentences, threshold_);
  std::vector<SentencePrediction> categories;
  if (category_model_) categories = classify_sentences(*category_model_, sentences);

  std::vector<FeedItem> items;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    FeedItem item;
    item.seq = *sentences[i].seq;
    item.sentence = std::move(sentences[i]);
    item.label = predictions[i].label;
    item.probability = predictions[i].probability;
    item.category = category_model_ ? categories[i].category : predictions[i].category;
    items.push_back(std::move(item));
  }

  if (!items.empty()) store_.append_items(session_id, items);
  TranscriptSession meta = st.meta;
  meta.next_seq = seq;
  meta.leftover = segments.leftover;
  store_.write_session(meta);

  st.meta = std::move(meta);
  st.items.insert(st.items.end(), items.begin(), items.end());
  return items;
}

std::vector<FeedItem> LiveService::get_feed(const std::string& session_id, std::int64_t since) const {
  const auto& st = state(session_id);
  std::shared_lock lock(st.mutex);
  const std::int64_t first = std::max<std::int64_t>(since + 1, 0);
  if (first >= static_cast<std::int64_t>(st.items.size())) return {};
  return {st.items.begin() + first, st.items.end()};
}

FeedItem LiveService::set_highlight(const std::string& session_id, std::int64_t seq, bool value) {
  auto& st = state(session_id);
  std::unique_lock lock(st.mutex);
  if (seq < 0 || seq >= static_cast<std::int64_t>(st.items.size())) {
    throw Error(ErrorCode::ItemNotFound, "session '" + session_id + "' has no item " + std::to_string(seq));
  }
  auto& item = st.items[static_cast<std::size_t>(seq)];
  if (item.manual_highlight != value) {
    std::set<std::int64_t> highlighted;
    for (const auto& it : st.items) {
      if (it.seq == seq ? value : it.manual_highlight) highlighted.insert(it.seq);
    }
    store_.write_highlights(session_id, highlighted);
    item.manual_highlight = value;
  }
  return item;
}

std::string LiveService::export_claims(const std::string& session_id, ExportFilter filter) const {
  const auto& st = state(session_id);
  std::shared_lock lock(st.mutex);
  std::string out = "seq\ttext\tprobability\tcategory\tmanual_highlight\n";
  for (const auto& item : st.items) {
    const bool model_claim = item.label == BinaryLabel::Claim;
    const bool keep = filter == ExportFilter::ModelClaims        ? model_claim
                      : filter == ExportFilter::ManualHighlights ? item.manual_highlight
                                                                 : model_claim || item.manual_highlight;
    if (!keep) continue;
    std::string text = item.sentence.text;
    std::replace(text.begin(), text.end(), '\t', ' ');
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", item.seq, text,
                       item.probability ? fmt::format("{:.6f}", *item.probability) : "",
                       item.category ? std::to_string(code_of(*item.category)) : "",
                       item.manual_highlight ? "true" : "false");
  }
  return out;
}

}  // namespace claimspot
