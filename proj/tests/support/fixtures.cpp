#include "fixtures.hpp"

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "simjudge/corpus_qc.hpp"
#include "simjudge/numfmt.hpp"
#include "simjudge/rng.hpp"

namespace fixtures {

using simjudge::EmbeddingTable;
using simjudge::Rng;

namespace {

Eigen::VectorXd gaussian(Rng& rng, std::size_t d) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.normal();
    return v;
}

// Rounded to 9 significant digits so the file round trip is exact.
double nine(double x) { return simjudge::parse_real(simjudge::format_real(x)); }

simjudge::SimilarityMatrix bilinear_human(const Eigen::MatrixXd& z, const std::vector<std::string>& ids,
                                          const Eigen::VectorXd& w, double b, double noise, Rng& rng) {
    const auto n = z.rows();
    simjudge::SimilarityMatrix m;
    m.ids = ids;
    m.kind = simjudge::MatrixKind::kHuman;
    m.values = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m.values(i, i) = b + (z.row(i).array().square() * w.transpose().array()).sum();
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double s = b + (z.row(i).array() * z.row(j).array() * w.transpose().array()).sum() +
                             noise * rng.normal();
            m.values(i, j) = m.values(j, i) = s;
        }
    }
    return m;
}

}  // namespace

PlantedProblem planted_problem(std::size_t n, std::size_t d, double noise, std::uint64_t seed) {
    Rng rng(simjudge::derive_seed(seed, simjudge::stream::kFixtures));
    Eigen::MatrixXd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        z.row(i) = gaussian(rng, d).normalized().transpose();
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("img" + std::to_string(i + 1));

    PlantedProblem p;
    p.w = gaussian(rng, d);
    p.b = rng.uniform(-1.0, 1.0);
    p.embs = EmbeddingTable::from_matrix(ids, z);
    p.human = bilinear_human(z, ids, p.w, p.b, noise, rng);
    return p;
}

void write_corpus(const std::string& dir, std::uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& text) {
        simjudge::write_text_file((fs::path(dir) / name).string(), text);
    };
    Rng rng(simjudge::derive_seed(seed, simjudge::stream::kFixtures, 1));

    // 30 stimuli over 6 labels; "sea lion" needs the constituent sum and
    // "tatsoi" the synonym.
    const std::vector<std::string> labels{"red onion", "animal body", "tatsoi", "Cat", "dog", "sea lion"};
    const std::size_t n = 30;
    std::vector<std::string> ids;
    std::string labels_csv = "stimulus_id,label\n";
    for (std::size_t i = 0; i < n; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "s%02zu", i + 1);
        ids.emplace_back(id);
        labels_csv += ids.back() + "," + labels[i % labels.size()] + "\n";
    }
    put("labels.csv", labels_csv);

    const std::size_t word_dim = 8;
    EmbeddingTable words(word_dim);
    for (const char* w : {"red_onion", "animal", "body", "spoon_mustard", "cat", "dog", "sea", "lion", "tree"}) {
        std::vector<double> v(word_dim);
        for (auto& x : v) x = nine(rng.normal());
        words.add(w, v);
    }
    put("word_vectors.txt", simjudge::write_embedding_file(words));
    put("synonyms.tsv", "tatsoi\tspoon_mustard\n");

    // Sentence layers: layer 2 carries the structure behind the human
    // matrix, the others are noise.
    const std::size_t layer_dim = 12;
    Eigen::MatrixXd signal(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(layer_dim));
    for (Eigen::Index i = 0; i < signal.rows(); ++i) {
        for (Eigen::Index k = 0; k < signal.cols(); ++k) signal(i, k) = nine(rng.normal());
    }
    for (int layer = 0; layer < 4; ++layer) {
        Eigen::MatrixXd values = signal;
        if (layer != 2) {
            for (Eigen::Index i = 0; i < values.rows(); ++i) {
                for (Eigen::Index k = 0; k < values.cols(); ++k) values(i, k) = nine(rng.normal());
            }
        }
        char name[16];
        std::snprintf(name, sizeof name, "layer_%02d.txt", layer);
        put(name, simjudge::write_embedding_file(EmbeddingTable::from_matrix(ids, values)));
    }
    Eigen::MatrixXd unit = signal;
    for (Eigen::Index i = 0; i < unit.rows(); ++i) unit.row(i).normalize();
    Eigen::VectorXd w(static_cast<Eigen::Index>(layer_dim));
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = rng.uniform(0.5, 2.0);
    auto human = bilinear_human(unit, ids, w, 0.3, 0.01, rng);
    for (Eigen::Index i = 0; i < human.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < human.values.cols(); ++j) human.values(i, j) = nine(human.values(i, j));
    }
    put("human.csv", simjudge::write_similarity_csv(human));

    // Descriptions: five ordinary participants, one repeater, one control.
    const std::vector<std::string> vocab{
        "a",     "the",    "small",  "large",  "bright", "dark",  "red",    "green",  "animal", "plant",
        "sits",  "stands", "lies",   "near",   "under",  "on",    "wooden", "table",  "grass",  "field",
        "close", "view",   "of",     "with",   "leaves", "fur",   "eyes",   "looking", "camera", "soft",
        "light", "white",  "stone",  "water",  "fresh",  "sliced", "bowl",  "garden", "tall",   "old"};
    auto sentence = [&] {
        const std::size_t len = 6 + rng.below(6);
        std::string s;
        for (std::size_t k = 0; k < len; ++k) s += (k ? " " : "") + vocab[rng.below(vocab.size())];
        return s;
    };
    std::vector<simjudge::DescriptionRecord> records;
    for (int p = 1; p <= 5; ++p) {
        const std::string pid = "p" + std::to_string(p);
        for (std::size_t t = 1; t <= 12; ++t) {
            records.push_back({pid, ids[(static_cast<std::size_t>(p) * 7 + t * 5) % n], t, sentence()});
        }
    }
    records.push_back({"p1", ids[0], 13, "There is a red onion on the table"});
    records.push_back({"p2", ids[1], 13, "dog dog dog dog dog"});
    records.push_back({"p3", ids[2], 13, "ok"});
    const std::string repeated = "a small animal sits on the grass near a tree";
    for (std::size_t t = 1; t <= 8; ++t) {
        records.push_back({"p_rep", ids[t - 1], t, repeated});
        records.push_back({"p_ctl", ids[t - 1], t, sentence() + ", \"quoted\" " + sentence()});
    }
    put("descriptions.csv", simjudge::write_descriptions_csv(records));

    nlohmann::ordered_json config;
    config["dataset"] = "fixture";
    config["labels"] = "labels.csv";
    config["descriptions"] = "descriptions.csv";
    config["word_embeddings"] = "word_vectors.txt";
    config["synonyms"] = "synonyms.tsv";
    config["human_matrix"] = "human.csv";
    config["sources"] = {{{"name", "Labels"}, {"path", "out/smoothed_onehot.txt"}},
                         {{"name", "Word embedding"}, {"path", "out/word_embedding.txt"}}};
    config["layers_name"] = "Sentence";
    config["sentence_layers"] = {"layer_00.txt", "layer_01.txt", "layer_02.txt", "layer_03.txt"};
    config["k_folds"] = 6;
    config["seed"] = seed;
    config["alphas"] = {0.01, 0.1, 1.0, 10.0};
    config["epsilon"] = 0.8;
    config["mds"] = {{"dim", 2}, {"restarts", 4}, {"max_iter", 300}, {"tol", 1e-9}};
    config["top_k"] = 10;
    config["out_dir"] = "out";
    put("config.json", config.dump(2) + "\n");
}

}  // namespace fixtures
