#include <atomic>
#include <random>
#include <thread>

#include "claimspot/error.hpp"
#include "claimspot/service.hpp"
#include "doctest.h"
#include "model_fixture.hpp"
#include "support.hpp"

using namespace claimspot;
using Strings = std::vector<std::string>;

namespace {

template <typename F>
ErrorCode failure(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("segmentation") {
  auto r = segment_transcript("He said so. She agreed!");
  CHECK(r.sentences == Strings{"He said so.", "She agreed!"});
  CHECK(r.leftover.empty());

  r = segment_transcript("Mr. Smith spoke");
  CHECK(r.sentences.empty());
  CHECK(r.leftover == "Mr. Smith spoke");

  r = segment_transcript("");
  CHECK(r.sentences.empty());
  CHECK(r.leftover.empty());

  r = segment_transcript("Dr. Jones met the U.K. team. Then   what? Unemployment fell in the");
  CHECK(r.sentences == Strings{"Dr. Jones met the U.K. team.", "Then what?"});
  CHECK(r.leftover == "Unemployment fell in the");

  r = segment_transcript("last year.", "Unemployment fell in the");
  CHECK(r.sentences == Strings{"Unemployment fell in the last year."});

  r = segment_transcript("It was 3.5 percent. \"Really?\" Yes.");
  CHECK(r.sentences == Strings{"It was 3.5 percent.", "\"Really?\"", "Yes."});

  r = segment_transcript("prices rose. and fell");
  CHECK(r.sentences.empty());
  CHECK(r.leftover == "prices rose. and fell");

  CHECK(is_abbreviation("Mrs."));
  CHECK_FALSE(is_abbreviation("fell."));
}

TEST_CASE("sessions") {
  testing::TempDir dir;
  LiveService svc(dir / "store", testing::small_model());
  const auto s = svc.create_session("PMQs 12 Sept");
  CHECK(s.next_seq == 0);
  CHECK(s.title == "PMQs 12 Sept");
  const auto t = svc.create_session("Question Time");
  CHECK(s.id != t.id);
  CHECK(svc.list_sessions().size() == 2);

  const auto named = svc.create_session("x", std::string("debate-1"));
  CHECK(named.id == "debate-1");
  CHECK(failure([&] { svc.create_session("y", std::string("debate-1")); }) == ErrorCode::DuplicateSession);
  CHECK(failure([&] { svc.create_session("y", std::string("../evil")); }) == ErrorCode::InvalidArgument);
  CHECK(failure([&] { svc.append_text("nope", "Hi."); }) == ErrorCode::SessionNotFound);
}

TEST_CASE("an unusable store is reported") {
  testing::TempDir dir;
  const auto file = dir.write("plain-file", "x");
  CHECK(failure([&] { SessionStore store(file / "sub"); }) == ErrorCode::StoreUnavailable);
  CHECK(failure([&] { LiveService svc(file, testing::small_model()); }) == ErrorCode::StoreUnavailable);
}

TEST_CASE("appending text") {
  testing::TempDir dir;
  LiveService svc(dir.path(), testing::small_model());
  const auto id = svc.create_session("s").id;

  auto items = svc.append_text(id, "Unemployment fell by 3 percent. Thank you very much.");
  REQUIRE(items.size() == 2);
  CHECK(items[0].seq == 0);
  CHECK(items[1].seq == 1);
  CHECK(items[1].sentence.context == Strings{"Unemployment fell by 3 percent."});
  CHECK(items[0].probability.has_value());

  CHECK(svc.append_text(id, "Inflation rose").empty());
  items = svc.append_text(id, " since last year. Okay");
  REQUIRE(items.size() == 1);
  CHECK(items[0].sentence.text == "Inflation rose since last year.");
  CHECK(items[0].seq == 2);
  CHECK(items[0].sentence.context.size() == 2);
  CHECK(svc.get_feed(id, -1).size() == 3);

  CHECK(svc.get_feed(id, 2).empty());
  CHECK(svc.get_feed(id, 0).size() == 2);

  // Offline classification of the same sentences gives the same labels.
  const auto feed = svc.get_feed(id, -1);
  std::vector<Sentence> sentences;
  for (const auto& item : feed) sentences.push_back(item.sentence);
  const auto offline = classify_sentences(*testing::small_model(), sentences);
  for (std::size_t i = 0; i < feed.size(); ++i) {
    CHECK(feed[i].label == offline[i].label);
    CHECK(feed[i].probability == offline[i].probability);
  }
}

TEST_CASE("no model") {
  testing::TempDir dir;
  LiveService svc(dir.path(), nullptr);
  const auto id = svc.create_session("s").id;
  CHECK_FALSE(svc.model_loaded());
  CHECK(failure([&] { svc.append_text(id, "Hello there."); }) == ErrorCode::ModelNotLoaded);
}

TEST_CASE("highlights, export and restart") {
  testing::TempDir dir;
  std::string id;
  std::vector<FeedItem> before;
  {
    LiveService svc(dir.path(), testing::small_model());
    id = svc.create_session("s").id;
    std::string text;
    for (int i = 0; i < 10; ++i) text += i % 3 ? "Thank you very much. " : "Tax rose by 5 percent. ";
    REQUIRE(svc.append_text(id, text).size() == 10);
    svc.append_text(id, "Half a");

    const auto writes = svc.store().highlight_writes();
    CHECK(svc.set_highlight(id, 4, true).manual_highlight);
    svc.set_highlight(id, 4, true);
    CHECK(svc.store().highlight_writes() == writes + 1);
    svc.set_highlight(id, 7, true);
    CHECK(failure([&] { svc.set_highlight(id, 10, true); }) == ErrorCode::ItemNotFound);
    CHECK(failure([&] { svc.set_highlight(id, -1, true); }) == ErrorCode::ItemNotFound);

    const auto manual = svc.export_claims(id, ExportFilter::ManualHighlights);
    CHECK(count_lines(manual) == 1 + 2);
    CHECK(manual.rfind("seq\ttext\tprobability\tcategory\tmanual_highlight\n", 0) == 0);

    const auto claims = svc.export_claims(id, ExportFilter::ModelClaims);
    const auto both = svc.export_claims(id, ExportFilter::Both);
    std::size_t union_size = 0;
    for (const auto& item : svc.get_feed(id, -1)) union_size += item.label == BinaryLabel::Claim || item.manual_highlight;
    CHECK(count_lines(both) == 1 + union_size);
    CHECK(count_lines(claims) <= count_lines(both));

    const auto empty = svc.create_session("e").id;
    CHECK(svc.export_claims(empty, ExportFilter::Both) == "seq\ttext\tprobability\tcategory\tmanual_highlight\n");
    before = svc.get_feed(id, -1);
  }
  LiveService again(dir.path(), testing::small_model());
  const auto after = again.get_feed(id, -1);
  REQUIRE(after.size() == before.size());
  for (std::size_t i = 0; i < after.size(); ++i) CHECK(to_wire(after[i]) == to_wire(before[i]));
  CHECK(after[4].manual_highlight);
  CHECK(after[7].manual_highlight);

  // The leftover survived too, and numbering continues.
  const auto next = again.append_text(id, "sentence about tax.");
  REQUIRE(next.size() == 1);
  CHECK(next[0].sentence.text == "Half a sentence about tax.");
  CHECK(next[0].seq == 10);

  again.set_highlight(id, 4, false);
  LiveService third(dir.path(), testing::small_model());
  CHECK_FALSE(third.get_feed(id, -1)[4].manual_highlight);
}

TEST_CASE("a torn final log line is ignored on restart") {
  testing::TempDir dir;
  std::string id;
  {
    LiveService svc(dir.path(), testing::small_model());
    id = svc.create_session("s").id;
    svc.append_text(id, "One thing. Two things.");
  }
  std::ofstream(dir.path() / id / "feed.jsonl", std::ios::app) << "{\"seq\":2,\"te";
  LiveService svc(dir.path(), testing::small_model());
  CHECK(svc.get_feed(id, -1).size() == 2);
}

TEST_CASE("polling during appends sees a gap-free prefix") {
  testing::TempDir dir;
  LiveService svc(dir.path(), testing::small_model());
  const auto id = svc.create_session("s").id;
  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::thread poller([&] {
    while (!done) {
      const auto feed = svc.get_feed(id, -1);
      for (std::size_t i = 0; i < feed.size(); ++i) {
        if (feed[i].seq != static_cast<std::int64_t>(i)) ++bad;
      }
    }
  });
  for (int i = 0; i < 50; ++i) svc.append_text(id, "Tax rose. We thank you. ");
  done = true;
  poller.join();
  CHECK(bad == 0);
  CHECK(svc.get_feed(id, -1).size() == 100);
}

TEST_CASE("wire format") {
  FeedItem item;
  item.seq = 3;
  item.sentence = {"s-3", "Tax rose.", {}, "live:s", 3};
  item.label = BinaryLabel::Claim;
  item.probability = 0.75;
  const auto j = to_wire(item);
  CHECK(j["seq"] == 3);
  CHECK(j["label"] == "claim");
  CHECK(j["probability"] == 0.75);
  CHECK_FALSE(j.contains("category"));
  CHECK(j["manual_highlight"] == false);
  item.probability.reset();
  item.category = ClaimCategory::Quantity;
  CHECK(to_wire(item)["probability"].is_null());
  CHECK(to_wire(item)["category"] == 2);
  CHECK(export_filter_from_string("manual_highlights") == ExportFilter::ManualHighlights);
  CHECK_THROWS_AS(export_filter_from_string("all"), Error);
}
