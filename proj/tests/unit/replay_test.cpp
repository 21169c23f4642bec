#include <gtest/gtest.h>

#include <filesystem>

#include "fake_llm.hpp"
#include "mifc/error.hpp"
#include "mifc/jsonl_io.hpp"
#include "mifc/replay.hpp"

namespace mifc {
namespace {

namespace fs = std::filesystem;

ChatRequest condense_request(const std::string& text, int variant = 0) {
    return make_request(PromptId::kCondense, {{"LANG", "English"}, {"original_text", text}}, 0.7, variant);
}

TEST(Replay, KeyDependsOnEveryField) {
    const auto base = condense_request("a");
    const auto key = replay_key("m", base);
    EXPECT_EQ(key, replay_key("m", condense_request("a")));
    EXPECT_NE(key, replay_key("m2", base));
    EXPECT_NE(key, replay_key("m", condense_request("b")));
    EXPECT_NE(key, replay_key("m", condense_request("a", 1)));
    auto hot = base;
    hot.temperature = 0.0;
    EXPECT_NE(key, replay_key("m", hot));
}

TEST(Replay, RecordThenReplayIsIdentical) {
    auto live = std::make_shared<testing::FakeLlm>("gpt-4o-mini");
    auto store = std::make_shared<ReplayStore>();
    RecordingProvider recorder(live, store);
    std::vector<ChatExchange> recorded;
    for (const char* text : {"Insulin lowers glucose [3].", "Aspirin thins blood.", "See https://x.org now."}) {
        recorded.push_back(recorder.complete(condense_request(text)));
    }
    EXPECT_EQ(store->size(), 3u);

    const auto path = fs::temp_directory_path() / "mifc_replay_test.jsonl";
    store->save(path);
    const auto loaded = ReplayStore::load(path);
    EXPECT_EQ(loaded->serialize(), store->serialize());
    EXPECT_EQ(read_file(path), store->serialize());

    ReplayProvider replay(loaded, "gpt-4o-mini");
    for (const auto& ex : recorded) EXPECT_EQ(replay.complete(ex.request), ex);
}

TEST(Replay, SaveOrderIsIndependentOfInsertionOrder) {
    auto llm = std::make_shared<testing::FakeLlm>("m");
    ReplayStore a, b;
    const auto r1 = llm->complete(condense_request("one"));
    const auto r2 = llm->complete(condense_request("two"));
    a.put(r1);
    a.put(r2);
    b.put(r2);
    b.put(r1);
    EXPECT_EQ(a.serialize(), b.serialize());
}

TEST(Replay, MissIsTransportError) {
    ReplayProvider replay(std::make_shared<ReplayStore>(), "m");
    try {
        replay.complete(condense_request("absent"));
        FAIL();
    } catch (const TransportError& e) {
        EXPECT_EQ(e.status(), 0);
    }
}

TEST(Replay, MalformedFileIsFormatError) {
    const auto path = fs::temp_directory_path() / "mifc_replay_bad.jsonl";
    write_file_atomic(path, "{broken\n");
    EXPECT_THROW(ReplayStore::load(path), FormatError);
}

}  // namespace
}  // namespace mifc
