#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "xlemb/composition.hpp"
#include "xlemb/embedding_table.hpp"
#include "xlemb/error.hpp"

using namespace xlemb;
namespace fs = std::filesystem;

namespace {

VectorList random_words(std::mt19937_64& rng, std::size_t len, std::size_t dim, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    VectorList words(len, std::vector<double>(dim));
    for (auto& w : words) {
        for (auto& x : w) x = n(rng);
    }
    return words;
}

double dot(const std::vector<double>& a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("init_table moments and determinism") {
    const EmbeddingTable t = init_table(25000, 40, 0.1, 17);
    const auto& v = t.values();
    REQUIRE(v.size() == 1000000);
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(v.size() - 1));
    CHECK(std::abs(mean) <= 4 * 0.1 / std::sqrt(1e6));
    CHECK(std::abs(sd - 0.1) <= 0.002);
    CHECK(init_table(50, 8, 0.1, 17) == init_table(50, 8, 0.1, 17));
    CHECK_FALSE(init_table(50, 8, 0.1, 17) == init_table(50, 8, 0.1, 18));
}

TEST_CASE("compose_add examples") {
    const auto c = compose_add({{1, 0}, {0, 2}});
    CHECK(c.values == std::vector<double>{1, 2});
    CHECK(c.source_len == 2);
    CHECK(compose_add({{3, -1}}).values == std::vector<double>{3, -1});
    CHECK_THROWS_AS(compose_add({}), CompositionError);

    std::mt19937_64 rng(1);
    auto words = random_words(rng, 7, 5);
    const auto before = compose_add(words).values;
    std::shuffle(words.begin(), words.end(), rng);
    const auto after = compose_add(words).values;
    for (std::size_t i = 0; i < 5; ++i) CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-12));
}

TEST_CASE("compose_bi examples") {
    CHECK(compose_bi({{0, 0}, {0, 0}}).values == std::vector<double>{0, 0});
    const auto c = compose_bi({{10, -10}, {10, -10}});
    CHECK(c.values[0] == std::tanh(20.0));
    CHECK(c.values[1] == std::tanh(-20.0));
    CHECK(c.source_len == 2);
    CHECK_THROWS_AS(compose_bi({{1, 1}}), CompositionError);
    CHECK_THROWS_AS(compose_bi({}), CompositionError);

    const auto three = compose_bi({{0.1, 0.2}, {0.3, -0.1}, {-0.5, 0.4}});
    CHECK(three.values[0] == doctest::Approx(std::tanh(0.4) + std::tanh(-0.2)));
    CHECK(three.values[1] == doctest::Approx(std::tanh(0.1) + std::tanh(0.3)));
}

TEST_CASE("compose_bi is order-sensitive: concrete counterexample") {
    std::mt19937_64 rng(2);
    bool found = false;
    for (int attempt = 0; attempt < 100 && !found; ++attempt) {
        auto words = random_words(rng, 3, 4);
        const auto a = compose_bi(words).values;
        std::swap(words[0], words[1]);
        const auto b = compose_bi(words).values;
        for (std::size_t i = 0; i < a.size(); ++i) found |= std::abs(a[i] - b[i]) > 1e-6;
    }
    CHECK(found);
}

TEST_CASE("compose_bi output is bounded by the number of bigrams") {
    std::mt19937_64 rng(3);
    for (std::size_t len = 2; len <= 12; ++len) {
        const auto c = compose_bi(random_words(rng, len, 6, 5.0));
        for (double x : c.values) {
            CHECK(std::isfinite(x));
            CHECK(std::abs(x) <= static_cast<double>(len - 1));
        }
    }
}

TEST_CASE("compose_backward analytic examples") {
    const std::vector<double> g{1.5, -2.0};
    const auto add = compose_backward(CompositionKind::add, {{1, 2}, {3, 4}, {5, 6}}, g);
    REQUIRE(add.size() == 3);
    for (const auto& w : add) CHECK(w == g);

    const auto bi = compose_backward(CompositionKind::bi, VectorList(4, {0.0, 0.0}), g);
    CHECK(bi[0] == g);
    CHECK(bi[1] == std::vector<double>{3.0, -4.0});
    CHECK(bi[2] == std::vector<double>{3.0, -4.0});
    CHECK(bi[3] == g);
}

TEST_CASE("compose_backward matches central differences") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> dim_d(2, 40), len_d(1, 12);
    const double h = 1e-5;
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const CompositionKind kind = trial % 2 ? CompositionKind::bi : CompositionKind::add;
        const std::size_t dim = dim_d(rng);
        const std::size_t len = std::max<std::size_t>(len_d(rng), kind == CompositionKind::bi ? 2 : 1);
        auto words = random_words(rng, len, dim);
        const auto up = random_words(rng, 1, dim).front();
        const auto grads = compose_backward(kind, words, up);
        for (std::size_t i = 0; i < len; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                const double w0 = words[i][j];
                words[i][j] = w0 + h;
                const double fp = dot(up, compose(kind, words).values);
                words[i][j] = w0 - h;
                const double fm = dot(up, compose(kind, words).values);
                words[i][j] = w0;
                const double numeric = (fp - fm) / (2 * h);
                const double rel = std::abs(numeric - grads[i][j]) /
                                   std::max({1.0, std::abs(numeric), std::abs(grads[i][j])});
                worst = std::max(worst, rel);
            }
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("table API agrees with the vector API") {
    std::mt19937_64 rng(5);
    const EmbeddingTable t = init_table(10, 6, 0.5, 9);
    const std::vector<WordId> ids{3, 1, 4, 1, 5};
    VectorList words;
    for (WordId id : ids) words.emplace_back(t.row(id).begin(), t.row(id).end());
    for (CompositionKind kind : {CompositionKind::add, CompositionKind::bi}) {
        const auto a = compose(kind, t, ids), b = compose(kind, words);
        CHECK(a.source_len == 5);
        for (std::size_t j = 0; j < 6; ++j) CHECK(a.values[j] == doctest::Approx(b.values[j]).epsilon(1e-14));

        const auto up = random_words(rng, 1, 6).front();
        std::vector<double> flat(ids.size() * 6);
        compose_backward(kind, t, ids, up, flat);
        const auto ref = compose_backward(kind, words, up);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = 0; j < 6; ++j) CHECK(flat[i * 6 + j] == doctest::Approx(ref[i][j]).epsilon(1e-14));
        }
    }
    // corpus path: one-token sentence under bi composes to zero
    const std::vector<WordId> single{2};
    const auto z = compose(CompositionKind::bi, t, single);
    CHECK(z.values == std::vector<double>(6, 0.0));
    CHECK(z.source_len == 1);
    CHECK_THROWS_AS(compose(CompositionKind::add, t, std::span<const WordId>{}), CompositionError);
}

TEST_CASE("compose_document examples") {
    const EmbeddingTable t = init_table(8, 3, 1.0, 2);
    const std::vector<Sentence> doc{{1, 2, 3}, {4, 5}};
    const auto d = compose_document(doc, t, CompositionKind::add);
    const auto flat = compose(CompositionKind::add, t, std::vector<WordId>{1, 2, 3, 4, 5});
    CHECK(d.source_len == 5);
    for (std::size_t j = 0; j < 3; ++j) CHECK(d.values[j] == doctest::Approx(flat.values[j]).epsilon(1e-14));

    const std::vector<Sentence> one{{1, 2}};
    CHECK(compose_document(one, t, CompositionKind::add).values ==
          compose(CompositionKind::add, t, one[0]).values);

    const auto s1 = compose(CompositionKind::bi, t, doc[0]).values;
    const auto s2 = compose(CompositionKind::bi, t, doc[1]).values;
    const auto bi = compose_document(doc, t, CompositionKind::bi);
    for (std::size_t j = 0; j < 3; ++j) CHECK(bi.values[j] == doctest::Approx(std::tanh(s1[j] + s2[j])));

    CHECK_THROWS_AS(compose_document(one, t, CompositionKind::bi), CompositionError);
    CHECK(compose_document(one, t, CompositionKind::bi, false).values == std::vector<double>(3, 0.0));
    CHECK_THROWS_AS(compose_document(std::vector<Sentence>{}, t, CompositionKind::add), CompositionError);
}

TEST_CASE("export/import round trip is exact") {
    const fs::path dir = fs::temp_directory_path() / "xlemb_test_embeddings";
    fs::create_directories(dir);
    EmbeddingTable t = init_table(4, 3, 0.1, 5);
    t.row(2)[1] = 1.0 / 3.0;
    t.row(3)[0] = -0.0;
    const std::vector<std::string> tokens{"<unk>", "haus", "straße", "x"};
    export_text(dir / "e.vec", t, tokens);

    std::ifstream f(dir / "e.vec");
    std::string header;
    std::getline(f, header);
    CHECK(header == "4 3");

    const LoadedEmbeddings back = import_text(dir / "e.vec");
    CHECK(back.table == t);
    CHECK(back.vocab.tokens() == tokens);

    // files without an UNK row get a zero row 0
    const std::vector<std::string> docs{"d1", "d2", "d3", "d4"};
    export_text(dir / "d.vec", t, docs);
    const LoadedEmbeddings d = import_text(dir / "d.vec");
    CHECK(d.table.rows() == 5);
    CHECK(d.vocab.id("d1") == 1);
    for (double x : d.table.row(0)) CHECK(x == 0.0);
    CHECK(std::equal(t.row(0).begin(), t.row(0).end(), d.table.row(1).begin()));
}

TEST_CASE("import rejects malformed files") {
    const fs::path dir = fs::temp_directory_path() / "xlemb_test_embeddings";
    fs::create_directories(dir);
    std::ofstream(dir / "bad.vec") << "2 3\n<unk> 0 0 0\nword 1 2\n";
    CHECK_THROWS_AS(import_text(dir / "bad.vec"), DataError);
    std::ofstream(dir / "nan.vec") << "1 2\nword nan 1\n";
    CHECK_THROWS_AS(import_text(dir / "nan.vec"), DataError);
}
