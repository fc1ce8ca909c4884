#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "simjudge/embedding_store.hpp"
#include "simjudge/similarity.hpp"

namespace fixtures {

// Unit-normalised Gaussian embeddings z (n x d), w ~ N(0, 1), b ~ U(-1, 1)
// and s_ij = b + w'(z_i * z_j) + N(0, noise^2) on the off-diagonal.
struct PlantedProblem {
    simjudge::EmbeddingTable embs{1};
    simjudge::SimilarityMatrix human;
    Eigen::VectorXd w;
    double b = 0.0;
};

PlantedProblem planted_problem(std::size_t n, std::size_t d, double noise, std::uint64_t seed);

// Small but complete corpus for the command pipeline, written into `dir`:
//   labels.csv, descriptions.csv, word_vectors.txt, synonyms.tsv,
//   human.csv, layer_00.txt .. layer_03.txt, config.json
// config.json points fit-eval at out/onehot.txt and out/word_embedding.txt,
// which the encode commands produce. Participant "p_rep" repeats one sentence
// and must be excluded at trial 6; "p_ctl" answers the same images with
// varied text.
void write_corpus(const std::string& dir, std::uint64_t seed);

}  // namespace fixtures
