#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "support/synthetic.hpp"
#include "xlemb/corpus.hpp"
#include "xlemb/embedding_table.hpp"
#include "xlemb/vocabulary.hpp"

using namespace xlemb;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "xlemb");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

void write(const fs::path& p, const std::vector<std::string>& lines) { write_lines(p, lines); }

// Letter-only renaming keeps the lowercase filter out of the way.
std::string letters(std::string s) {
    for (char& c : s) {
        if (c >= '0' && c <= '9') c = static_cast<char>('a' + (c - '0'));
        if (c == '_') c = 'q';
    }
    return s;
}

struct Workspace {
    fs::path dir;
    synth::Generator gen{7};

    Workspace() {
        dir = fs::temp_directory_path() / "xlemb_test_cli";
        fs::remove_all(dir);
        fs::create_directories(dir);
        auto text = synth::make_text_corpus(gen, 300, 400);
        for (auto* v : {&text.bi_l1, &text.bi_l2, &text.mono_l1, &text.mono_l2}) {
            for (auto& s : *v) s = letters(s);
        }
        text.bi_l1.push_back("NUMBERS 2014 REPORT");  // filtered with its partner
        text.bi_l2.push_back("zahlen");
        write(dir / "bi.l1", text.bi_l1);
        write(dir / "bi.l2", text.bi_l2);
        write(dir / "mono.l1", text.mono_l1);
        write(dir / "mono.l2", text.mono_l2);
    }

    std::string p(const std::string& name) const { return (dir / name).string(); }

    Result preprocess(const std::string& out = "data") {
        return run_cli({"preprocess", "--bi-l1", p("bi.l1"), "--bi-l2", p("bi.l2"), "--mono-l1", p("mono.l1"),
                        "--mono-l2", p("mono.l2"), "--out-dir", p(out)});
    }

    Result train(const std::string& prefix, std::vector<std::string> extra = {}) {
        std::vector<std::string> args{"train", "--data-dir", p("data"), "--out-prefix", p(prefix), "--dim", "8",
                                      "--epochs", "5", "--batch-size", "200", "--log", p(prefix + ".log")};
        args.insert(args.end(), extra.begin(), extra.end());
        return run_cli(args);
    }
};

Workspace& workspace() {
    static Workspace w;
    static bool ready = false;
    if (!ready) {
        REQUIRE(w.preprocess().code == 0);
        REQUIRE(w.train("emb").code == 0);
        ready = true;
    }
    return w;
}

}  // namespace

TEST_CASE("help lists flags with defaults and exits 0") {
    const Result r = run_cli({"train", "--help"});
    CHECK(r.code == 0);
    for (const char* s : {"--dim", "[40]", "--learning-rate", "[0.2]", "--batch-size", "[40000]", "--margin",
                          "--lambda", "[1]", "--epochs-with-mono", "[25]", "--epochs-bi-only", "[100]", "--seed",
                          "--bilingual-limit", "--threads"}) {
        CHECK_MESSAGE(r.out.find(s) != std::string::npos, s);
    }
    const Result p = run_cli({"preprocess", "--help"});
    CHECK(p.code == 0);
    for (const char* s : {"--cutoff-l1", "[0.9]", "--cutoff-l2", "[0.7]", "--unk-mono-l1", "[5]", "--unk-mono-l2",
                          "[3]", "--unk-bi-l1", "[2]"}) {
        CHECK_MESSAGE(p.out.find(s) != std::string::npos, s);
    }
    CHECK(run_cli({"classify-eval", "--help"}).out.find("[10]") != std::string::npos);
    CHECK(run_cli({"nn", "--help"}).out.find("[cosine]") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({"train", "--bogus"}).code == 1);
    CHECK(run_cli({"nn", "--src", "/nonexistent.vec", "-q", "a"}).code == 1);
    CHECK(run_cli({"nn", "--src", "/nonexistent.vec", "-q", "a", "--metric", "manhattan"}).code == 1);
}

TEST_CASE("preprocess statistics match an independent recount") {
    Workspace& w = workspace();
    const Result r = w.preprocess("data2");
    REQUIRE(r.code == 0);
    const Vocabulary v1 = Vocabulary::load(w.dir / "data2" / "vocab.l1.tsv");
    const Vocabulary v2 = Vocabulary::load(w.dir / "data2" / "vocab.l2.tsv");
    CHECK(v1.token(0) == "<unk>");

    struct Row {
        std::string file;
        std::string name;
        std::size_t vocab;
        std::size_t removed;
    };
    const Row rows[] = {{"bi.l1.ids", "bilingual-l1", v1.size(), 1},
                        {"bi.l2.ids", "bilingual-l2", v2.size(), 1},
                        {"mono.l1.ids", "mono-l1", v1.size(), 0},
                        {"mono.l2.ids", "mono-l2", v2.size(), 0}};
    for (const auto& row : rows) {
        // recount from the raw encoded file
        std::ifstream f(w.dir / "data2" / row.file);
        std::string line;
        std::size_t sentences = 0, tokens = 0;
        std::set<std::string> types;
        while (std::getline(f, line)) {
            ++sentences;
            std::istringstream in(line);
            std::string id;
            while (in >> id) {
                ++tokens;
                types.insert(id);
            }
        }
        std::istringstream table(r.out);
        std::string tl;
        bool found = false;
        while (std::getline(table, tl)) {
            std::istringstream cols(tl);
            std::string name, type;
            std::size_t thr = 0, s = 0, t = 0, ty = 0, rm = 0;
            if (!(cols >> name) || name != row.name) continue;
            REQUIRE(static_cast<bool>(cols >> type >> thr >> s >> t >> ty >> rm));
            CHECK(s == sentences);
            CHECK(t == tokens);
            CHECK(ty == types.size());
            CHECK(rm == row.removed);
            found = true;
        }
        CHECK_MESSAGE(found, row.name);
    }
    CHECK(r.out.find("vocab-l1 size " + std::to_string(v1.size())) != std::string::npos);
    // bilingual sides stay aligned after joint removal
    CHECK(read_lines(w.dir / "data2" / "bi.l1.ids").size() == read_lines(w.dir / "data2" / "bi.l2.ids").size());
}

TEST_CASE("preprocess thresholds come from flags and config files") {
    Workspace& w = workspace();
    write(w.dir / "p.conf", {"# thresholds", "unk_mono_l1 = 1000000", "unk_bi_l1 = 1000000"});
    const Result r = run_cli({"preprocess", "--bi-l1", w.p("bi.l1"), "--bi-l2", w.p("bi.l2"), "--mono-l1",
                              w.p("mono.l1"), "--out-dir", w.p("data3"), "--config", w.p("p.conf")});
    REQUIRE(r.code == 0);
    CHECK(Vocabulary::load(w.dir / "data3" / "vocab.l1.tsv").size() == 1);
    write(w.dir / "bad.conf", {"unk_mono_l9 = 3"});
    CHECK(run_cli({"preprocess", "--mono-l1", w.p("mono.l1"), "--out-dir", w.p("data4"), "--config",
                   w.p("bad.conf")})
              .code == 1);
    CHECK_FALSE(fs::exists(w.dir / "data4"));
}

TEST_CASE("preprocess edge cases") {
    Workspace& w = workspace();
    write(w.dir / "empty.l1", {});
    write(w.dir / "empty.l2", {});
    const Result e = run_cli({"preprocess", "--bi-l1", w.p("empty.l1"), "--bi-l2", w.p("empty.l2"), "--out-dir",
                              w.p("empty")});
    CHECK(e.code == 0);
    CHECK(e.err.find("warning") != std::string::npos);
    CHECK(Vocabulary::load(w.dir / "empty" / "vocab.l1.tsv").size() == 1);

    write(w.dir / "short.l2", {"one line"});
    const Result m = run_cli({"preprocess", "--bi-l1", w.p("bi.l1"), "--bi-l2", w.p("short.l2"), "--out-dir",
                              w.p("mis")});
    CHECK(m.code == 2);
    CHECK_FALSE(fs::exists(w.dir / "mis" / "vocab.l1.tsv"));

    CHECK(run_cli({"preprocess", "--bi-l1", w.p("bi.l1"), "--out-dir", w.p("x")}).code == 1);
    CHECK(run_cli({"preprocess", "--mono-l1", w.p("nope"), "--out-dir", w.p("x")}).code == 1);
    CHECK(run_cli({"preprocess", "--mono-l1", w.p("mono.l1"), "--cutoff-l1", "1.5", "--out-dir", w.p("x")}).code ==
          1);
    CHECK_FALSE(fs::exists(w.dir / "x"));
}

TEST_CASE("train writes embeddings, log and checkpoint; seeds reproduce") {
    Workspace& w = workspace();
    CHECK(fs::exists(w.dir / "emb.l1.vec"));
    CHECK(fs::exists(w.dir / "emb.l2.vec"));
    CHECK(fs::exists(w.dir / "emb.ckpt"));
    const auto log = read_lines(w.dir / "emb.log");
    CHECK(log.size() == 5 * 2);  // largest corpus 400, batch 200
    REQUIRE(w.train("again").code == 0);
    CHECK(slurp(w.dir / "again.l1.vec") == slurp(w.dir / "emb.l1.vec"));
    CHECK(slurp(w.dir / "again.l2.vec") == slurp(w.dir / "emb.l2.vec"));
    REQUIRE(w.train("seeded", {"--seed", "9"}).code == 0);
    CHECK(slurp(w.dir / "seeded.l1.vec") != slurp(w.dir / "emb.l1.vec"));
}

TEST_CASE("train: resume, export and failure modes") {
    Workspace& w = workspace();
    REQUIRE(w.train("half", {"--checkpoint-every", "1"}).code == 0);
    // export reproduces the training output from the checkpoint
    REQUIRE(run_cli({"export", "--checkpoint", w.p("half.ckpt"), "--data-dir", w.p("data"), "--out-prefix",
                     w.p("exported")})
                .code == 0);
    CHECK(slurp(w.dir / "exported.l1.vec") == slurp(w.dir / "half.l1.vec"));

    // resuming a finished checkpoint is a no-op on the parameters
    REQUIRE(run_cli({"train", "--data-dir", w.p("data"), "--out-prefix", w.p("resumed"), "--resume",
                     w.p("half.ckpt"), "--log", w.p("resumed.log")})
                .code == 0);
    CHECK(slurp(w.dir / "resumed.l1.vec") == slurp(w.dir / "half.l1.vec"));
    CHECK(run_cli({"train", "--data-dir", w.p("data"), "--out-prefix", w.p("r2"), "--resume", w.p("half.ckpt"),
                   "--dim", "4"})
              .code == 1);

    const Result zero_dim = run_cli({"train", "--data-dir", w.p("data"), "--out-prefix", w.p("bad"), "--dim", "0"});
    CHECK(zero_dim.code == 1);
    CHECK(zero_dim.err.find("dim") != std::string::npos);
    CHECK(w.train("bad", {"--mix", "0.5,0.5"}).code == 1);
    CHECK_FALSE(fs::exists(w.dir / "bad.l1.vec"));
    write(w.dir / "t.conf", {"dimension = 4"});
    CHECK(w.train("bad", {"--config", w.p("t.conf")}).code == 1);

    const Result boom = w.train("boom", {"--learning-rate", "1e300"});
    CHECK(boom.code == 3);
    CHECK(fs::exists(w.dir / "boom.ckpt"));
    CHECK_FALSE(fs::exists(w.dir / "boom.l1.vec"));
}

TEST_CASE("train config file and bilingual limit") {
    Workspace& w = workspace();
    write(w.dir / "run.conf", {"dim = 6", "epochs = 2", "batch_size = 100", "bilingual_limit = 50",
                               "use_mono = false", "eval_train_size = 1000"});
    REQUIRE(run_cli({"train", "--data-dir", w.p("data"), "--out-prefix", w.p("conf"), "--config", w.p("run.conf"),
                     "--log", w.p("conf.log")})
                .code == 0);
    const LoadedEmbeddings e = import_text(w.dir / "conf.l1.vec");
    CHECK(e.table.dim() == 6);
    // bilingual only, 50 pairs, batch 100 -> one batch per epoch
    CHECK(read_lines(w.dir / "conf.log").size() == 2);
    for (const auto& line : read_lines(w.dir / "conf.log")) {
        std::istringstream in(line);
        double e1, b, bi, m1, m2;
        in >> e1 >> b >> bi >> m1 >> m2;
        CHECK(m1 == 0.0);
        CHECK(m2 == 0.0);
    }
}

TEST_CASE("nn queries") {
    Workspace& w = workspace();
    const std::string tok = letters("f0");
    const Result self = run_cli({"nn", "--src", w.p("emb.l1.vec"), "-q", tok, "--k", "1"});
    REQUIRE(self.code == 0);
    CHECK(self.out.rfind(tok + "\t1\t" + tok + "\t", 0) == 0);

    const Result oov = run_cli({"nn", "--src", w.p("emb.l1.vec"), "-q", "zzzz", "-q", tok});
    CHECK(oov.code == 2);
    CHECK(oov.err.find("emb.l1.vec") != std::string::npos);
    CHECK(oov.out.find(tok + "\t1\t") != std::string::npos);

    write(w.dir / "queries.txt", {tok + " " + letters("f1"), letters("t0_0")});
    const Result a = run_cli({"nn", "--src", w.p("emb.l1.vec"), "--dst", w.p("emb.l2.vec"), "--queries-file",
                              w.p("queries.txt"), "--k", "3"});
    const Result b = run_cli({"nn", "--src", w.p("emb.l1.vec"), "--dst", w.p("emb.l2.vec"), "--queries-file",
                              w.p("queries.txt"), "--k", "3"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(read_lines(w.dir / "queries.txt").size() == 2);
    std::istringstream lines(a.out);
    std::string l;
    std::size_t n = 0;
    while (std::getline(lines, l)) ++n;
    CHECK(n == 9);
}

TEST_CASE("compose sums word vectors") {
    Workspace& w = workspace();
    const std::string a = letters("f0"), b = letters("f1");
    write(w.dir / "docs.tsv", {"X\tdoc1\t" + a + " " + b + "\x1f" + a, "Y\tdoc2\t" + b});
    REQUIRE(run_cli({"compose", "--emb", w.p("emb.l1.vec"), "--docs", w.p("docs.tsv"), "--out", w.p("docs.vec")})
                .code == 0);
    const LoadedEmbeddings emb = import_text(w.dir / "emb.l1.vec");
    const LoadedEmbeddings docs = import_text(w.dir / "docs.vec");
    REQUIRE(docs.vocab.size() == 3);
    const auto va = emb.table.row(emb.vocab.id(a)), vb = emb.table.row(emb.vocab.id(b));
    const auto d1 = docs.table.row(docs.vocab.id("doc1"));
    for (std::size_t j = 0; j < emb.table.dim(); ++j) {
        CHECK(d1[j] == doctest::Approx(2 * va[j] + vb[j]).epsilon(1e-14));
    }
    REQUIRE(run_cli({"compose", "--emb", w.p("emb.l1.vec"), "--docs", w.p("docs.tsv"), "--out", w.p("mean.vec"),
                     "--norm", "by_token_count"})
                .code == 0);
    const LoadedEmbeddings mean = import_text(w.dir / "mean.vec");
    for (std::size_t j = 0; j < emb.table.dim(); ++j) {
        CHECK(mean.table.row(1)[j] == doctest::Approx(d1[j] / 3).epsilon(1e-14));
    }
    std::vector<std::string> one{"X\tonly\t" + a};
    write(w.dir / "one.tsv", one);
    REQUIRE(run_cli({"compose", "--emb", w.p("emb.l1.vec"), "--docs", w.p("one.tsv"), "--out", w.p("one.vec")})
                .code == 0);
    CHECK(read_lines(w.dir / "one.vec").size() == 2);  // header + 1 line
}

TEST_CASE("classify-eval writes identical reports for equal seeds") {
    Workspace& w = workspace();
    auto train_docs = synth::make_documents(w.gen, 60, false, "tr");
    auto test_docs = synth::make_documents(w.gen, 40, true, "te");
    std::vector<std::string> tr, te;
    for (auto& d : train_docs) {
        for (auto& s : d.sentences) s = letters(s);
        tr.push_back(format_document_line(d));
    }
    for (auto& d : test_docs) {
        for (auto& s : d.sentences) s = letters(s);
        te.push_back(format_document_line(d));
    }
    write(w.dir / "train.docs", tr);
    write(w.dir / "test.docs", te);
    const std::vector<std::string> args{"classify-eval", "--emb-l1", w.p("emb.l1.vec"), "--emb-l2",
                                        w.p("emb.l2.vec"), "--train-l1", w.p("train.docs"), "--test-l2",
                                        w.p("test.docs"), "--train-size", "30", "--report", w.p("report.txt")};
    const Result a = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(slurp(w.dir / "report.txt") == a.out);
    CHECK(a.out.find("train_size=30") != std::string::npos);
    CHECK(run_cli(args).out == a.out);

    te.push_back("Z\tnew\t" + letters("f0"));
    write(w.dir / "test2.docs", te);
    CHECK(run_cli({"classify-eval", "--emb-l1", w.p("emb.l1.vec"), "--emb-l2", w.p("emb.l2.vec"), "--train-l1",
                   w.p("train.docs"), "--test-l2", w.p("test2.docs")})
              .code == 2);
    CHECK(run_cli({"classify-eval", "--emb-l1", w.p("emb.l1.vec"), "--emb-l2", w.p("emb.l2.vec"), "--train-l1",
                   w.p("train.docs")})
              .code == 1);
}
