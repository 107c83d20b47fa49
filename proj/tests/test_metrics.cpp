#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <doctest.h>
#include <json.hpp>

#include "generators.hpp"
#include "lexeval/error.hpp"
#include "lexeval/metrics.hpp"
#include "oracles.hpp"

using namespace lexeval;

namespace {

Tokenizer identity_tokenizer() {
    Tokenizer tokenizer;
    tokenizer.normalizer = std::make_shared<IdentityNormalizer>();
    return tokenizer;
}

MetricConfig test_config() {
    MetricConfig config;
    config.tokenizer = identity_tokenizer();
    config.splitter = SentenceSplitter({"ст.", "г."});
    config.patterns = LegalPatterns({R"(ст\.\s*\d+)"});
    config.embeddings = std::make_shared<HashEmbedding>(config.tokenizer, 64);
    config.sentiment = std::make_shared<NeutralSentiment>();
    config.ner = std::make_shared<HeuristicNer>();
    return config;
}

Document make_doc(std::string source, std::array<std::string, kBlockCount> blocks) {
    Document doc;
    doc.id = "t";
    doc.source_text = std::move(source);
    doc.blocks = std::move(blocks);
    return doc;
}

Document tiling_doc() {
    // blocks partition the source at token boundaries, in order
    return make_doc("альфа бета гамма дельта эпсилон дзета эта тета йота",
                    {"альфа бета", "гамма", "дельта эпсилон", "дзета", "эта", "тета", "йота"});
}

// exact-text fixture providers
struct MapEmbedding final : EmbeddingProvider {
    std::map<std::string, std::vector<double>, std::less<>> vectors;
    std::size_t dimension = 3;

    Embedding embed(std::string_view text) const override {
        auto it = vectors.find(text);
        if (it != vectors.end()) return Embedding{it->second};
        return Embedding{std::vector<double>(dimension, 0.0)};
    }
    std::size_t dim() const override { return dimension; }
};

struct MapSentiment final : SentimentProvider {
    std::map<std::string, SentimentScores, std::less<>> scores;

    SentimentScores score(std::string_view sentence) const override {
        auto it = scores.find(sentence);
        if (it != scores.end()) return it->second;
        return {0.0, 0.0, 1.0};
    }
};

struct MapNer final : NerProvider {
    std::map<std::string, std::set<NerEntity>, std::less<>> entities_by_text;

    std::set<NerEntity> entities(std::string_view text) const override {
        auto it = entities_by_text.find(text);
        if (it != entities_by_text.end()) return it->second;
        return {};
    }
};

}  // namespace

TEST_CASE("combined extraction joins blocks with single newlines") {
    const Document doc = make_doc("src", {"a", "", "c", "", "", "", "g"});
    CHECK(combined_extraction(doc) == "a\n\nc\n\n\n\ng");
    CHECK(combined_extraction(doc) == oracle::combined(doc));
}

TEST_CASE("coverage_ratio spec examples") {
    const MetricConfig config = test_config();

    SUBCASE("blocks partition the source -> 1.0") {
        const Document doc = tiling_doc();
        const DocumentAnalysis a(doc, config);
        CHECK(coverage_ratio(a) == 1.0);
    }
    SUBCASE("extraction disjoint from key terms -> 0.0") {
        const Document doc = make_doc("альфа бета гамма", {"омега", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(coverage_ratio(a) == 0.0);
    }
    SUBCASE("50 key terms, 25 preserved -> 0.5") {
        // 50 distinct tokens, frequency one each; the extraction keeps 25
        std::string source, extraction;
        for (int i = 0; i < 50; ++i) {
            std::string token = "w";
            token += static_cast<char>('a' + i / 26);
            token += static_cast<char>('a' + i % 26);
            source += token + " ";
            if (i % 2 == 0) extraction += token + " ";
        }
        const Document doc = make_doc(source, {extraction, "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(coverage_ratio(a) == 0.5);
        CHECK(coverage_ratio(a) == oracle::coverage_ratio(doc, config));
    }
    SUBCASE("empty source -> 0.0") {
        const Document doc = make_doc("", {"текст", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(coverage_ratio(a) == 0.0);
    }
}

TEST_CASE("block_completeness is bit-identical to coverage_ratio") {
    std::mt19937_64 rng(21);
    const MetricConfig config = test_config();
    for (int i = 0; i < 20; ++i) {
        const Document doc = testgen::make_document("c" + std::to_string(i), rng);
        const DocumentAnalysis a(doc, config);
        CHECK(block_completeness(a) == coverage_ratio(a));
    }
}

TEST_CASE("redundancy_penalty spec examples") {
    MetricConfig config = test_config();

    SUBCASE("all blocks identical -> 1.0") {
        const Document doc = make_doc("x", {"иск суд", "иск суд", "иск суд", "иск суд",
                                            "иск суд", "иск суд", "иск суд"});
        const DocumentAnalysis a(doc, config);
        CHECK(redundancy_penalty(a) == 1.0);
    }
    SUBCASE("orthonormal fixture -> 0.0") {
        auto fake = std::make_shared<MapEmbedding>();
        fake->dimension = 7;
        for (std::size_t b = 0; b < kBlockCount; ++b) {
            std::vector<double> v(7, 0.0);
            v[b] = 1.0;
            fake->vectors["b" + std::to_string(b)] = v;
        }
        config.embeddings = fake;
        const Document doc = make_doc("x", {"b0", "b1", "b2", "b3", "b4", "b5", "b6"});
        const DocumentAnalysis a(doc, config);
        CHECK(redundancy_penalty(a) == 0.0);
    }
    SUBCASE("known pairwise cosines -> brute-force mean") {
        auto fake = std::make_shared<MapEmbedding>();
        fake->vectors = {{"b0", {1, 0, 0}}, {"b1", {0.8, 0.6, 0}}, {"b2", {0, 1, 0}},
                         {"b3", {0, 0, 1}}, {"b4", {0.6, 0.8, 0}}, {"b5", {1, 1, 0}},
                         {"b6", {0, 0, 2}}};
        config.embeddings = fake;
        const Document doc = make_doc("x", {"b0", "b1", "b2", "b3", "b4", "b5", "b6"});
        const DocumentAnalysis a(doc, config);
        CHECK(redundancy_penalty(a) ==
              doctest::Approx(oracle::redundancy_penalty(doc, config)).epsilon(1e-12));
    }
}

TEST_CASE("redundancy_penalty is invariant under shuffling block contents") {
    std::mt19937_64 rng(22);
    const MetricConfig config = test_config();
    const Document doc = testgen::make_document("r", rng);
    const DocumentAnalysis a(doc, config);
    const double baseline = redundancy_penalty(a);
    Document shuffled = doc;
    std::shuffle(shuffled.blocks.begin(), shuffled.blocks.end(), rng);
    const DocumentAnalysis b(shuffled, config);
    CHECK(redundancy_penalty(b) == doctest::Approx(baseline).epsilon(1e-12));
}

TEST_CASE("compression_ratio spec examples") {
    const MetricConfig config = test_config();
    SUBCASE("blocks tile the source -> 1.0") {
        const Document doc = tiling_doc();
        const DocumentAnalysis a(doc, config);
        CHECK(compression_ratio(a) == 1.0);
    }
    SUBCASE("all blocks empty -> 0.0") {
        const Document doc = make_doc("альфа бета", {"", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(compression_ratio(a) == 0.0);
    }
    SUBCASE("10 source tokens, 4 block tokens -> 0.4") {
        const Document doc = make_doc("a b c d e f g h i j", {"a b", "c d", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(compression_ratio(a) == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(compression_ratio(a) == oracle::compression_ratio(doc, config));
    }
}

TEST_CASE("term_frequency_coherence spec examples") {
    const MetricConfig config = test_config();
    SUBCASE("extraction equals source -> exactly 1.0") {
        const Document doc = tiling_doc();
        const DocumentAnalysis a(doc, config);
        CHECK(term_frequency_coherence(a) == 1.0);
    }
    SUBCASE("disjoint vocabularies -> 0.0") {
        const Document doc = make_doc("альфа бета", {"гамма", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(term_frequency_coherence(a) == 0.0);
    }
    SUBCASE("D = 'a a b', E = 'a b b' -> 0.8") {
        // shared vocabulary gets unit idf, so the vectors are the plain counts
        const Document doc = make_doc("a a b", {"a b b", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(term_frequency_coherence(a) == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(term_frequency_coherence(a) ==
              doctest::Approx(oracle::term_frequency_coherence(doc, config)).epsilon(1e-12));
    }
}

TEST_CASE("citation_coverage spec examples") {
    MetricConfig config = test_config();
    config.patterns = LegalPatterns{};

    SUBCASE("extraction equals source -> 1.0") {
        const Document doc = tiling_doc();
        const DocumentAnalysis a(doc, config);
        CHECK(citation_coverage(a) == 1.0);
    }
    SUBCASE("empty extraction -> 0.0 when the source cites anything") {
        const Document doc = make_doc("альфа бета", {"", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(citation_coverage(a) == 0.0);
    }
    SUBCASE("empty citation set -> vacuous 1.0") {
        const Document doc = make_doc("", {"", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(citation_coverage(a) == 1.0);
    }
    SUBCASE("8 citations, 4 preserved -> 0.5") {
        auto ner = std::make_shared<MapNer>();
        const Document doc = make_doc("слово", {"слово", "", "", "", "", "", ""});
        const std::string extraction = combined_extraction(doc);
        std::set<NerEntity> source_entities, extraction_entities;
        for (int i = 0; i < 7; ++i) {
            const NerEntity entity{"цитата" + std::to_string(i), NerCategory::org};
            source_entities.insert(entity);
            if (i < 3) extraction_entities.insert(entity);
        }
        ner->entities_by_text[doc.source_text] = source_entities;
        ner->entities_by_text[extraction] = extraction_entities;
        config.ner = ner;
        // C_D = {слово + 7 entities} = 8 items, C_E = {слово + 3 entities} = 4
        const DocumentAnalysis a(doc, config);
        CHECK(citation_coverage(a) == 0.5);
        CHECK(citation_coverage(a) == oracle::citation_coverage(doc, config));
    }
}

TEST_CASE("intra_block_coherence spec examples") {
    MetricConfig config = test_config();

    SUBCASE("single-sentence and empty blocks score 1.0") {
        const Document doc = make_doc("x", {"Одно предложение.", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        const BlockMetric metric = intra_block_coherence(a);
        for (double v : metric.per_block) CHECK(v == 1.0);
        CHECK(metric.document_mean == 1.0);
    }
    SUBCASE("three identical sentences -> 1.0") {
        const Document doc =
            make_doc("x", {"Суд решил. Суд решил. Суд решил.", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(intra_block_coherence(a).per_block[0] == 1.0);
    }
    SUBCASE("fixture sentence vectors -> mean over three pairs") {
        auto fake = std::make_shared<MapEmbedding>();
        fake->vectors = {{"Право тут.", {1, 0, 0}},
                         {"Суд там.", {0.6, 0.8, 0}},
                         {"Иск возможен.", {0, 1, 0}}};
        config.embeddings = fake;
        const Document doc =
            make_doc("x", {"Право тут. Суд там. Иск возможен.", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        const BlockMetric metric = intra_block_coherence(a);
        // pairs: cos=0.6, 0.0, 0.8 -> mean (brute force)
        CHECK(metric.per_block[0] == doctest::Approx((0.6 + 0.0 + 0.8) / 3).epsilon(1e-12));
        const BlockMetric expected = oracle::intra_block_coherence(doc, config);
        for (std::size_t b = 0; b < kBlockCount; ++b)
            CHECK(metric.per_block[b] == doctest::Approx(expected.per_block[b]).epsilon(1e-12));
        CHECK(metric.document_mean == doctest::Approx(expected.document_mean).epsilon(1e-12));
    }
}

TEST_CASE("inter_block_distinctiveness spec examples") {
    MetricConfig config = test_config();

    SUBCASE("identical blocks -> 0.0 everywhere") {
        const Document doc =
            make_doc("x", {"иск суд", "иск суд", "иск суд", "иск суд", "иск суд", "иск суд",
                           "иск суд"});
        const DocumentAnalysis a(doc, config);
        const BlockMetric metric = inter_block_distinctiveness(a);
        for (double v : metric.per_block) CHECK(v == 0.0);
        CHECK(metric.document_mean == 0.0);
    }
    SUBCASE("orthonormal fixture -> 1.0 everywhere") {
        auto fake = std::make_shared<MapEmbedding>();
        fake->dimension = 7;
        std::array<std::string, kBlockCount> blocks;
        for (std::size_t b = 0; b < kBlockCount; ++b) {
            std::vector<double> v(7, 0.0);
            v[b] = 1.0;
            blocks[b] = "b" + std::to_string(b);
            fake->vectors[blocks[b]] = v;
        }
        config.embeddings = fake;
        const Document doc = make_doc("x", blocks);
        const DocumentAnalysis a(doc, config);
        const BlockMetric metric = inter_block_distinctiveness(a);
        for (double v : metric.per_block) CHECK(v == 1.0);
    }
    SUBCASE("mixed fixture matches the six-term mean oracle") {
        std::mt19937_64 rng(23);
        const Document doc = testgen::make_document("ib", rng);
        const DocumentAnalysis a(doc, config);
        const BlockMetric metric = inter_block_distinctiveness(a);
        const BlockMetric expected = oracle::inter_block_distinctiveness(doc, config);
        for (std::size_t b = 0; b < kBlockCount; ++b)
            CHECK(metric.per_block[b] == doctest::Approx(expected.per_block[b]).epsilon(1e-12));
    }
}

TEST_CASE("distinctiveness complements the mean block cosine") {
    std::mt19937_64 rng(24);
    const MetricConfig config = test_config();
    const Document doc = testgen::make_document("cmpl", rng);
    const DocumentAnalysis a(doc, config);
    const BlockMetric metric = inter_block_distinctiveness(a);
    for (std::size_t i = 0; i < kBlockCount; ++i) {
        double mean_cos = 0.0;
        for (std::size_t j = 0; j < kBlockCount; ++j) {
            if (i != j)
                mean_cos += cosine(a.block_embedding(kAllBlocks[i]),
                                   a.block_embedding(kAllBlocks[j]));
        }
        mean_cos /= 6.0;
        CHECK(metric.per_block[i] + mean_cos == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("semantic_entropy spec examples") {
    const MetricConfig config = test_config();

    SUBCASE("single repeated token -> 0.0") {
        const Document doc = make_doc("x", {"иск иск иск", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(semantic_entropy(a) == 0.0);
    }
    SUBCASE("four equiprobable tokens -> 2.0") {
        const Document doc = make_doc("x", {"a b c d", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(semantic_entropy(a) == 2.0);
    }
    SUBCASE("counts {2,1,1} -> 1.5") {
        const Document doc = make_doc("x", {"a a b c", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(semantic_entropy(a) == 1.5);
    }
    SUBCASE("empty extraction -> 0.0") {
        const Document doc = make_doc("x", {"", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(semantic_entropy(a) == 0.0);
    }
}

TEST_CASE("semantic_entropy is bounded by log2 of the distinct token count") {
    std::mt19937_64 rng(25);
    const MetricConfig config = test_config();
    for (int i = 0; i < 20; ++i) {
        const Document doc = testgen::make_document("e" + std::to_string(i), rng);
        const DocumentAnalysis a(doc, config);
        const double entropy = semantic_entropy(a);
        CHECK(entropy >= 0.0);
        CHECK(entropy <= std::log2(static_cast<double>(a.combined_token_set().size())) + 1e-9);
        CHECK(entropy == doctest::Approx(oracle::semantic_entropy(doc, config)).epsilon(1e-12));
    }
}

TEST_CASE("neutrality_bias spec examples") {
    MetricConfig config = test_config();

    SUBCASE("constant-neutral provider -> 1.0 for every block") {
        std::mt19937_64 rng(26);
        const Document doc = testgen::make_document("n", rng);
        const DocumentAnalysis a(doc, config);
        const BlockMetric metric = neutrality_bias(a);
        for (double v : metric.per_block) CHECK(v == 1.0);
        CHECK(metric.document_mean == 1.0);
    }
    SUBCASE("fully positive sentences -> 0.0") {
        auto fake = std::make_shared<MapSentiment>();
        fake->scores["Хорошо весьма."] = {1.0, 0.0, 0.0};
        config.sentiment = fake;
        const Document doc = make_doc("x", {"Хорошо весьма. Хорошо весьма.", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(neutrality_bias(a).per_block[0] == 0.0);
    }
    SUBCASE("polar plus neutral sentence -> 0.75") {
        auto fake = std::make_shared<MapSentiment>();
        fake->scores["Истец прав."] = {0.6, 0.1, 0.3};
        fake->scores["Суд заседал."] = {0.0, 0.0, 1.0};
        config.sentiment = fake;
        const Document doc = make_doc("x", {"Истец прав. Суд заседал.", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        // P=0.6/2, N=0.1/2 -> 1 - 0.25
        CHECK(neutrality_bias(a).per_block[0] == doctest::Approx(0.75).epsilon(1e-12));
        const BlockMetric expected = oracle::neutrality_bias(doc, config);
        CHECK(neutrality_bias(a).per_block[0] ==
              doctest::Approx(expected.per_block[0]).epsilon(1e-12));
    }
}

TEST_CASE("raw_cosine_similarity spec examples") {
    MetricConfig config = test_config();

    SUBCASE("extraction equals source -> exactly 1.0") {
        const Document doc = tiling_doc();
        const DocumentAnalysis a(doc, config);
        CHECK(raw_cosine_similarity(a) == 1.0);
    }
    SUBCASE("empty extraction -> 0.0") {
        const Document doc = make_doc("иск суд", {"", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(raw_cosine_similarity(a) == 0.0);
    }
    SUBCASE("fixture vectors -> dot-product oracle") {
        auto fake = std::make_shared<MapEmbedding>();
        const Document doc = make_doc("ист", {"экс", "", "", "", "", "", ""});
        fake->vectors[doc.source_text] = {0.6, 0.8, 0.0};
        fake->vectors[combined_extraction(doc)] = {1.0, 0.0, 0.0};
        config.embeddings = fake;
        const DocumentAnalysis a(doc, config);
        CHECK(raw_cosine_similarity(a) == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(raw_cosine_similarity(a) ==
              doctest::Approx(oracle::raw_cosine_similarity(doc, config)).epsilon(1e-12));
    }
}

TEST_CASE("block_order_consistency spec examples") {
    const MetricConfig config = test_config();

    SUBCASE("identical order -> 1.0") {
        const Document doc = tiling_doc();
        const DocumentAnalysis a(doc, config);
        CHECK(block_order_consistency(a) == 1.0);
    }
    SUBCASE("reversed distinct tokens -> 0.0") {
        const Document doc = make_doc("a b c d", {"d c b a", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(block_order_consistency(a) == 0.0);
    }
    SUBCASE("D=[a,b,c,d], E=[b,a,d,c] -> 2/3") {
        const Document doc = make_doc("a b c d", {"b a d c", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        // concordant 4, discordant 2 -> tau 1/3 -> (tau+1)/2
        CHECK(block_order_consistency(a) == doctest::Approx(2.0 / 3).epsilon(1e-12));
        CHECK(block_order_consistency(a) ==
              doctest::Approx(oracle::block_order_consistency(doc, config)).epsilon(1e-12));
    }
    SUBCASE("fewer than two matches -> 0.0") {
        const Document doc = make_doc("a b c", {"zz a yy", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(block_order_consistency(a) == 0.0);
    }
    SUBCASE("matches the brute-force oracle on random documents") {
        std::mt19937_64 rng(27);
        for (int i = 0; i < 10; ++i) {
            const Document doc = testgen::make_document("o" + std::to_string(i), rng);
            const DocumentAnalysis a(doc, config);
            const double value = block_order_consistency(a);
            CHECK(value >= 0.0);
            CHECK(value <= 1.0);
            CHECK(value ==
                  doctest::Approx(oracle::block_order_consistency(doc, config)).epsilon(1e-12));
        }
    }
}

TEST_CASE("monotonicity_score spec examples") {
    const MetricConfig config = test_config();

    SUBCASE("chronological dates -> 1.0") {
        const Document doc =
            make_doc("x", {"от 01.01.2020 и 01.02.2020", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(monotonicity_score(a) == 1.0);
    }
    SUBCASE("reversed dates -> 0.0") {
        const Document doc =
            make_doc("x", {"от 01.02.2020 и 01.01.2020", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(monotonicity_score(a) == 0.0);
    }
    SUBCASE("no dates and equal dates -> 1.0") {
        const Document no_dates = make_doc("x", {"без дат", "", "", "", "", "", ""});
        CHECK(monotonicity_score(DocumentAnalysis(no_dates, config)) == 1.0);
        const Document equal =
            make_doc("x", {"от 05.05.2020 и снова 05.05.2020", "", "", "", "", "", ""});
        CHECK(monotonicity_score(DocumentAnalysis(equal, config)) == 1.0);
    }
}

TEST_CASE("keyword_pseudo_f1 spec examples") {
    const MetricConfig config = test_config();

    SUBCASE("extraction token set equals the key set -> 1.0") {
        const Document doc = make_doc("ka kb kc kd", {"kd kc kb ka", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(keyword_pseudo_f1(a) == 1.0);
    }
    SUBCASE("disjoint sets -> 0.0") {
        const Document doc = make_doc("ka kb", {"zz yy", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(keyword_pseudo_f1(a) == 0.0);
    }
    SUBCASE("two of four key terms plus two strays -> 0.5") {
        const Document doc = make_doc("ka kb kc kd", {"ka kb zz yy", "", "", "", "", "", ""});
        const DocumentAnalysis a(doc, config);
        CHECK(keyword_pseudo_f1(a) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(keyword_pseudo_f1(a) ==
              doctest::Approx(oracle::keyword_pseudo_f1(doc, config)).epsilon(1e-12));
    }
}

TEST_CASE("legal_term_density spec examples") {
    MetricConfig config = test_config();
    config.patterns = LegalPatterns{};

    // 20 filler terms x5 occupy the extraction's top-20; two entities mark
    // the legal terms of the target block
    std::string filler;
    for (int i = 0; i < 20; ++i) {
        std::string token = "наполнитель";
        token += static_cast<char>('a' + i);
        for (int k = 0; k < 5; ++k) filler += token + " ";
    }
    const Document doc = make_doc("x", {"ka kb zz yy", filler, "qq rr", "", "", "", ""});
    auto ner = std::make_shared<MapNer>();
    ner->entities_by_text[combined_extraction(doc)] = {{"ka", NerCategory::org},
                                                       {"kb", NerCategory::org}};
    config.ner = ner;

    const DocumentAnalysis a(doc, config);
    const BlockMetric metric = legal_term_density(a);
    CHECK(metric.per_block[0] == doctest::Approx(0.5).epsilon(1e-12));  // ka, kb of 4
    CHECK(metric.per_block[1] == 1.0);  // every filler token is a top-20 term
    CHECK(metric.per_block[2] == 0.0);  // no legal terms
    CHECK(metric.per_block[3] == 0.0);  // empty block
    const BlockMetric expected = oracle::legal_term_density(doc, config);
    for (std::size_t b = 0; b < kBlockCount; ++b)
        CHECK(metric.per_block[b] == doctest::Approx(expected.per_block[b]).epsilon(1e-12));
}

namespace {

std::string scripted_judgment(const std::array<int, kBlockCount>& scores) {
    nlohmann::json reply = nlohmann::json::object();
    for (std::size_t b = 0; b < kBlockCount; ++b) {
        reply[std::string(to_string(kAllBlocks[b]))] = {{"score", scores[b]},
                                                        {"reason", "scripted"}};
    }
    return reply.dump();
}

JudgeOptions judge_options() {
    JudgeOptions options;
    options.model = "mock";
    options.prompt_template = "{{source_text}} {{blocks}}";
    return options;
}

}  // namespace

TEST_CASE("llm_evaluation spec examples") {
    std::mt19937_64 rng(28);
    const Document doc = testgen::make_document("llm", rng);

    SUBCASE("all fives -> per-block 5, mean 5.0") {
        const CallbackChatClient client(
            [](const ChatRequest&) { return scripted_judgment({5, 5, 5, 5, 5, 5, 5}); });
        const LlmMetric metric = llm_evaluation(doc, client, judge_options());
        for (int score : metric.scores) CHECK(score == 5);
        CHECK(metric.document_mean == 5.0);
    }
    SUBCASE("{5,5,5,5,5,5,3} -> mean 33/7") {
        const CallbackChatClient client(
            [](const ChatRequest&) { return scripted_judgment({5, 5, 5, 5, 5, 5, 3}); });
        const LlmMetric metric = llm_evaluation(doc, client, judge_options());
        CHECK(metric.document_mean == doctest::Approx(33.0 / 7).epsilon(1e-12));
    }
}

TEST_CASE("compute_all spec examples") {
    MetricConfig config = test_config();

    SUBCASE("llm disabled leaves no llm entries") {
        config.disabled.insert(std::string(metric_names::llm_evaluation));
        const MetricVector mv = compute_all(tiling_doc(), config);
        CHECK(!mv.document_metrics.contains(std::string(metric_names::llm_evaluation)));
        CHECK(!mv.block_metrics.contains(std::string(metric_names::llm_evaluation)));
        CHECK(!mv.llm_reasons.has_value());
        CHECK(mv.warnings.empty());
    }
    SUBCASE("no chat client -> llm metric missing with a warning") {
        const MetricVector mv = compute_all(tiling_doc(), config);
        CHECK(!mv.document_metrics.contains(std::string(metric_names::llm_evaluation)));
        REQUIRE(mv.warnings.size() == 1);
        CHECK(mv.warnings[0].find("llm_evaluation") != std::string::npos);
    }
    SUBCASE("failed judge -> metric absent, other metrics intact") {
        config.chat = std::make_shared<CallbackChatClient>(
            [](const ChatRequest&) { return std::string("nonsense"); });
        config.judge = judge_options();
        const MetricVector mv = compute_all(tiling_doc(), config);
        CHECK(!mv.document_metrics.contains(std::string(metric_names::llm_evaluation)));
        CHECK(mv.document_metrics.contains(std::string(metric_names::coverage_ratio)));
        REQUIRE(mv.warnings.size() == 1);
        CHECK(mv.warnings[0].find("exhausted retries") != std::string::npos);
    }
    SUBCASE("identity extraction scores 1.0 on all six structure metrics") {
        config.disabled.insert(std::string(metric_names::llm_evaluation));
        const MetricVector mv = compute_all(tiling_doc(), config);
        for (std::string_view name :
             {metric_names::coverage_ratio, metric_names::block_completeness,
              metric_names::compression_ratio, metric_names::term_frequency_coherence,
              metric_names::block_order_consistency, metric_names::raw_cosine_similarity}) {
            CHECK(mv.document_metrics.at(std::string(name)) == 1.0);
        }
    }
    SUBCASE("scripted judge lands in block metrics and reasons") {
        config.chat = std::make_shared<CallbackChatClient>(
            [](const ChatRequest&) { return scripted_judgment({1, 2, 3, 4, 5, 4, 3}); });
        config.judge = judge_options();
        const MetricVector mv = compute_all(tiling_doc(), config);
        const auto& scores = mv.block_metrics.at(std::string(metric_names::llm_evaluation));
        CHECK(scores[0] == 1.0);
        CHECK(scores[4] == 5.0);
        CHECK(mv.document_metrics.at(std::string(metric_names::llm_evaluation)) ==
              doctest::Approx(22.0 / 7).epsilon(1e-12));
        REQUIRE(mv.llm_reasons.has_value());
        CHECK((*mv.llm_reasons)[0] == "scripted");
    }
}

TEST_CASE("empty extraction fills the documented edge values") {
    MetricConfig config = test_config();
    config.disabled.insert(std::string(metric_names::llm_evaluation));
    const Document doc = make_doc("Иск подан 01.02.2020. Суд решил.", {"", "", "", "", "", "", ""});
    const MetricVector mv = compute_all(doc, config);

    const auto document = [&](std::string_view name) {
        return mv.document_metrics.at(std::string(name));
    };
    CHECK(document(metric_names::coverage_ratio) == 0.0);
    CHECK(document(metric_names::compression_ratio) == 0.0);
    CHECK(document(metric_names::keyword_pseudo_f1) == 0.0);
    CHECK(document(metric_names::raw_cosine_similarity) == 0.0);
    CHECK(document(metric_names::term_frequency_coherence) == 0.0);
    CHECK(document(metric_names::block_order_consistency) == 0.0);
    CHECK(document(metric_names::semantic_entropy) == 0.0);
    CHECK(document(metric_names::monotonicity_score) == 1.0);
    const auto& intra = mv.block_metrics.at(std::string(metric_names::intra_block_coherence));
    for (double v : intra) CHECK(v == 1.0);
    const auto& density = mv.block_metrics.at(std::string(metric_names::legal_term_density));
    for (double v : density) CHECK(v == 0.0);
}

TEST_CASE("empty document scores zero everywhere it divides by the source") {
    MetricConfig config = test_config();
    config.disabled.insert(std::string(metric_names::llm_evaluation));
    const Document doc = make_doc("", {"", "", "", "", "", "", ""});
    const MetricVector mv = compute_all(doc, config);
    CHECK(mv.document_metrics.at(std::string(metric_names::coverage_ratio)) == 0.0);
    CHECK(mv.document_metrics.at(std::string(metric_names::compression_ratio)) == 0.0);
    CHECK(mv.document_metrics.at(std::string(metric_names::citation_coverage)) == 1.0);
    CHECK(mv.document_metrics.at(std::string(metric_names::monotonicity_score)) == 1.0);
}

TEST_CASE("metric values stay inside their documented ranges") {
    std::mt19937_64 rng(30);
    MetricConfig config = test_config();
    config.chat = std::make_shared<CallbackChatClient>(
        [](const ChatRequest&) { return scripted_judgment({2, 5, 1, 3, 4, 5, 2}); });
    config.judge = judge_options();

    const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (int i = 0; i < 25; ++i) {
        const Document doc = testgen::make_document("rng" + std::to_string(i), rng);
        const MetricVector mv = compute_all(doc, config);
        const auto document = [&](std::string_view name) {
            return mv.document_metrics.at(std::string(name));
        };
        for (std::string_view name :
             {metric_names::coverage_ratio, metric_names::block_completeness,
              metric_names::citation_coverage, metric_names::keyword_pseudo_f1,
              metric_names::block_order_consistency}) {
            CHECK(in_unit(document(name)));
        }
        // compression compares lengths, not sets: duplicated content exceeds 1
        CHECK(document(metric_names::compression_ratio) >= 0.0);
        for (std::string_view name :
             {metric_names::redundancy_penalty, metric_names::raw_cosine_similarity}) {
            CHECK(document(name) >= -1.0);
            CHECK(document(name) <= 1.0);
        }
        CHECK(document(metric_names::semantic_entropy) >= 0.0);
        const double monotone = document(metric_names::monotonicity_score);
        CHECK((monotone == 0.0 || monotone == 1.0));
        for (double v : mv.block_metrics.at(std::string(metric_names::intra_block_coherence))) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
        // 1 - cosine per pair: signed embeddings reach past 1
        for (double v :
             mv.block_metrics.at(std::string(metric_names::inter_block_distinctiveness))) {
            CHECK(v >= 0.0);
            CHECK(v <= 2.0);
        }
        for (double v : mv.block_metrics.at(std::string(metric_names::neutrality_bias)))
            CHECK(in_unit(v));
        for (double v : mv.block_metrics.at(std::string(metric_names::legal_term_density)))
            CHECK(in_unit(v));
        for (double v : mv.block_metrics.at(std::string(metric_names::llm_evaluation))) {
            CHECK(v >= 1.0);
            CHECK(v <= 5.0);
        }
    }
}

TEST_CASE("metric vectors round-trip through JSON lines") {
    std::mt19937_64 rng(29);
    MetricConfig config = test_config();
    config.chat = std::make_shared<CallbackChatClient>(
        [](const ChatRequest&) { return scripted_judgment({4, 4, 4, 4, 4, 4, 4}); });
    config.judge = judge_options();

    const Document doc = testgen::make_document("rt", rng);
    const MetricVector mv = compute_all(doc, config);
    const MetricVector parsed = metric_vector_from_json_line(metric_vector_to_json_line(mv));

    CHECK(parsed.document_id == mv.document_id);
    CHECK(parsed.document_metrics == mv.document_metrics);
    CHECK(parsed.block_metrics == mv.block_metrics);
    REQUIRE(parsed.llm_reasons.has_value());
    CHECK(*parsed.llm_reasons == *mv.llm_reasons);
}
