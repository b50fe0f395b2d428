#include "claimspot/service.hpp"

#include <fstream>
#include <sstream>

#include "claimspot/error.hpp"

namespace claimspot {

using nlohmann::json;

json to_wire(const FeedItem& item) {
  json obj = {{"seq", item.seq},
              {"id", item.sentence.id},
              {"text", item.sentence.text},
              {"label", std::string(to_string(item.label))},
              {"probability", item.probability ? json(*item.probability) : json(nullptr)},
              {"manual_highlight", item.manual_highlight}};
  if (item.category) obj["category"] = code_of(*item.category);
  return obj;
}

json to_wire(const TranscriptSession& session) {
  return {{"id", session.id},
          {"title", session.title},
          {"created_at", session.created_at},
          {"next_seq", session.next_seq}};
}

namespace {

// The log keeps the full sentence (context included) so a restarted service
// re-serves identical items.
json to_log(const FeedItem& item) {
  json obj = to_wire(item);
  obj.erase("manual_highlight");
  obj["context"] = item.sentence.context;
  obj["source"] = item.sentence.source;
  return obj;
}

FeedItem from_log(const json& obj) {
  FeedItem item;
  item.seq = obj.at("seq").get<std::int64_t>();
  item.sentence.id = obj.at("id").get<std::string>();
  item.sentence.text = obj.at("text").get<std::string>();
  item.sentence.context = obj.value("context", std::vector<std::string>{});
  item.sentence.source = obj.value("source", std::string{});
  item.sentence.seq = item.seq;
  auto label = binary_label_from_string(obj.at("label").get<std::string>());
  if (!label) throw Error(ErrorCode::ParseError, "bad label in feed log");
  item.label = *label;
  if (const auto& p = obj.at("probability"); !p.is_null()) item.probability = p.get<double>();
  if (auto it = obj.find("category"); it != obj.end()) item.category = category_from_code(it->get<int>());
  return item;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw Error(ErrorCode::StoreUnavailable, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::StoreUnavailable, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::StoreUnavailable, "cannot replace " + path.string() + ": " + ec.message());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::StoreUnavailable, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StoreUnavailable, path.string() + ": " + e.what());
  }
}

}  // namespace

SessionStore::SessionStore(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw Error(ErrorCode::StoreUnavailable, "cannot use " + root_.string() + " as a session store");
  }
}

std::vector<std::string> SessionStore::session_ids() const {
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "session.json")) {
      ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void SessionStore::write_session(const TranscriptSession& session) {
  std::error_code ec;
  std::filesystem::create_directories(dir(session.id), ec);
  if (ec) throw Error(ErrorCode::StoreUnavailable, "cannot create session directory: " + ec.message());
  json obj = to_wire(session);
  obj["leftover"] = session.leftover;
  write_atomically(dir(session.id) / "session.json", obj.dump() + "\n");
}

TranscriptSession SessionStore::read_session(const std::string& id) const {
  const auto path = dir(id) / "session.json";
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::SessionNotFound, id);
  const auto obj = read_json(path);
  TranscriptSession s;
  s.id = obj.at("id").get<std::string>();
  s.title = obj.value("title", std::string{});
  s.created_at = obj.value("created_at", std::string{});
  s.next_seq = obj.value("next_seq", std::int64_t{0});
  s.leftover = obj.value("leftover", std::string{});
  return s;
}

void SessionStore::append_items(const std::string& id, std::span<const FeedItem> items) {
  std::string block;
  for (const auto& item : items) block += to_log(item).dump() + "\n";
  std::ofstream out(dir(id) / "feed.jsonl", std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::StoreUnavailable, "cannot append to feed log of " + id);
  out << block;
  out.flush();
  if (!out) throw Error(ErrorCode::StoreUnavailable, "append failed for " + id);
}

std::vector<FeedItem> SessionStore::read_items(const std::string& id) const {
  std::vector<FeedItem> items;
  std::ifstream in(dir(id) / "feed.jsonl");
  if (!in) return items;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      items.push_back(from_log(json::parse(line)));
    } catch (const json::exception&) {
      // A torn final line from an interrupted append.
      break;
    }
  }
  return items;
}

void SessionStore::write_highlights(const std::string& id, const std::set<std::int64_t>& seqs) {
  write_atomically(dir(id) / "highlights.json", json{{"highlighted", seqs}}.dump() + "\n");
  ++highlight_writes_;
}

std::set<std::int64_t> SessionStore::read_highlights(const std::string& id) const {
  const auto path = dir(id) / "highlights.json";
  if (!std::filesystem::exists(path)) return {};
  const auto seqs = read_json(path).at("highlighted").get<std::vector<std::int64_t>>();
  return {seqs.begin(), seqs.end()};
}

}  // namespace claimspot
