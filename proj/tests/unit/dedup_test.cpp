#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mifc/dedup.hpp"
#include "mifc/error.hpp"
#include "mifc/utf8.hpp"

namespace mifc {
namespace {

DataSample raw(std::string id, std::string text) {
    DataSample s;
    s.id = std::move(id);
    s.kind = SampleKind::kRawText;
    s.raw_text = std::move(text);
    return s;
}

std::set<std::u32string> oracle_shingles(const std::string& key, std::size_t k) {
    const std::u32string t = utf8::decode(key);
    std::set<std::u32string> out;
    if (t.size() < k) {
        out.insert(t);
        return out;
    }
    for (std::size_t i = 0; i + k <= t.size(); ++i) out.insert(t.substr(i, k));
    return out;
}

double oracle_jaccard(const std::set<std::u32string>& a, const std::set<std::u32string>& b) {
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Pairwise reference: keep a sample unless it equals or nearly equals an
// earlier survivor.
std::vector<std::string> oracle_survivors(const std::vector<DataSample>& in, const DedupConfig& cfg) {
    std::vector<std::string> keys;
    std::vector<std::set<std::u32string>> sets;
    std::vector<std::string> ids;
    for (const auto& s : in) {
        const std::string key = dedup_key(s);
        const auto set = oracle_shingles(key, cfg.shingle_size);
        bool dup = false;
        for (std::size_t j = 0; j < keys.size() && !dup; ++j) {
            dup = keys[j] == key || oracle_jaccard(sets[j], set) >= cfg.near_dup_threshold;
        }
        if (dup) continue;
        keys.push_back(key);
        sets.push_back(set);
        ids.push_back(s.id);
    }
    return ids;
}

std::string random_sentence(std::mt19937_64& rng) {
    static const std::vector<std::string> words = {"renal", "cardiac", "failure", "acute", "chronic", "dose",
                                                   "patient", "therapy", "insulin", "glucose", "lesion", "biopsy",
                                                   "fever", "sepsis", "culture", "stain", "anemia", "iron"};
    std::string out;
    const std::size_t n = 20 + rng() % 20;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += words[rng() % words.size()];
    }
    return out;
}

TEST(Dedup, KeyNormalisesCaseAndWhitespace) {
    EXPECT_EQ(dedup_key(raw("a", "  Insulin\tLOWERS \n glucose ")), "insulin lowers glucose");
    DataSample mc;
    mc.kind = SampleKind::kMultipleChoiceQa;
    mc.question = "Q?";
    mc.options = std::vector<McOption>{{"A", "x"}, {"B", "y"}, {"C", "z"}, {"D", "w"}};
    mc.answer = "B";
    DataSample other = mc;
    other.options->at(2).text = "zz";
    EXPECT_NE(dedup_key(mc), dedup_key(other));
}

TEST(Dedup, ShortTextIsOneShingle) {
    const auto s = shingles("abc", 5);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0], U"abc");
    EXPECT_EQ(shingles("abcdef", 5).size(), 2u);
}

TEST(Dedup, MatchesPairwiseOracle) {
    std::mt19937_64 rng(42);
    std::vector<DataSample> in;
    for (int i = 0; i < 470; ++i) in.push_back(raw("s" + std::to_string(i), random_sentence(rng)));
    for (int i = 0; i < 30; ++i) {
        std::string text = *in[rng() % 470].raw_text;
        if (i % 3 == 0) {
            text[rng() % text.size()] = 'q';
        } else if (i % 3 == 1) {
            for (char& c : text) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        } else {
            text += " x";
        }
        in.push_back(raw("p" + std::to_string(i), text));
    }
    std::shuffle(in.begin() + 1, in.end(), rng);
    DedupConfig cfg;
    const auto want = oracle_survivors(in, cfg);
    for (std::size_t workers : {1u, 4u}) {
        const auto got = dedup(in, cfg, workers);
        std::vector<std::string> ids;
        for (const auto& s : got.unique) ids.push_back(s.id);
        EXPECT_EQ(ids, want) << workers;
        EXPECT_EQ(got.report.exact_dups_removed + got.report.near_dups_removed, in.size() - want.size());
        EXPECT_EQ(got.report.removed.size(), in.size() - want.size());
    }
    EXPECT_GE(in.size() - want.size(), 30u);
}

TEST(Dedup, IndexQueryMatchesBruteForce) {
    std::mt19937_64 rng(3);
    for (double t : {0.3, 0.5, 0.8, 1.0}) {
        NearDupIndex index(t);
        std::vector<std::vector<Shingle>> sets;
        for (int i = 0; i < 200; ++i) {
            std::string text = random_sentence(rng).substr(0, 10 + rng() % 60);
            sets.push_back(shingles(text, 3));
            index.add(sets.back());
        }
        for (int q = 0; q < 50; ++q) {
            const auto probe = shingles(random_sentence(rng).substr(0, 10 + rng() % 60), 3);
            std::vector<std::size_t> want;
            for (std::size_t i = 0; i < sets.size(); ++i) {
                if (jaccard(sets[i], probe) >= t) want.push_back(i);
            }
            EXPECT_EQ(index.query(probe), want);
            EXPECT_EQ(index.query(sets[q]).empty(), false);
        }
    }
}

TEST(Dedup, FirstOccurrenceWins) {
    const auto r = dedup({raw("a", "Same text here."), raw("b", "same   TEXT here."), raw("c", "Other.")});
    ASSERT_EQ(r.unique.size(), 2u);
    EXPECT_EQ(r.unique[0].id, "a");
    EXPECT_EQ(r.report.exact_dups_removed, 1u);
    EXPECT_EQ(r.report.removed[0], (std::pair<std::string, std::string>{"b", "a"}));
}

TEST(Dedup, InvalidConfig) {
    DedupConfig cfg;
    cfg.near_dup_threshold = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.near_dup_threshold = 0.9;
    cfg.shingle_size = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace mifc
