#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace sciforge {

// Sparse embedding: (index, value) pairs with strictly increasing indices
// and L2 norm at most 1.
using SparseVec = std::vector<std::pair<std::uint32_t, double>>;

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dim() const = 0;
    // Identifies the embedding family a classifier was trained against;
    // scoring with a different provider is refused.
    virtual std::string id() const = 0;
    virtual SparseVec embed(const std::string& text) = 0; // throws Error(ProviderError)
};

// Hashed character n-grams (n = 2 and 3; the whole text when shorter),
// term-frequency weighted and L2-normalized. Deterministic for a given
// (dim, seed); needs no vocabulary and no network.
class HashedNgramProvider : public EmbeddingProvider {
public:
    explicit HashedNgramProvider(std::size_t dim = 4096, std::uint64_t seed = 0);
    std::size_t dim() const override { return dim_; }
    std::string id() const override;
    SparseVec embed(const std::string& text) override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

// Fetches embeddings from an HTTP endpoint: POST {"input": text} returning
// {"embedding": [..]}. Vectors longer than unit norm are rescaled. All
// failures surface as Error(ProviderError).
class RemoteEmbeddingProvider : public EmbeddingProvider {
public:
    RemoteEmbeddingProvider(std::string endpoint, std::size_t dim, int timeout_seconds = 60);
    std::size_t dim() const override { return dim_; }
    std::string id() const override;
    SparseVec embed(const std::string& text) override;

private:
    std::string endpoint_;
    std::size_t dim_;
    int timeout_seconds_;
};

struct TrainOptions {
    std::size_t epochs = 200;
    double learning_rate = 0.5;
};

// Linear quality model: full-batch logistic regression from a zero start,
// trained on positive (keep-worthy) and negative (reject-worthy) texts.
// Scores are 2*sigmoid(w.x + b) - 1, in (-1, 1); higher is better.
class QualityClassifier {
public:
    QualityClassifier() = default;

    // Throws Error(DegenerateData) when either class is empty. Training is
    // deterministic: embeddings are computed once and summed in input order.
    static QualityClassifier train(EmbeddingProvider& provider,
                                   const std::vector<std::string>& positives,
                                   const std::vector<std::string>& negatives,
                                   const TrainOptions& options = {});

    double score_text(EmbeddingProvider& provider, const std::string& text) const;
    double score_embedded(const SparseVec& vec) const; // throws Error(DimensionMismatch)

    std::size_t dim() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }
    const std::string& provider_id() const { return provider_id_; }
    // Hashing seed of the provider the model was trained with; persisted so
    // a reload can reconstruct the exact embedding.
    std::uint64_t seed() const { return seed_; }
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    // Mean training loss after each epoch; non-increasing at this learning
    // rate with unit-norm features.
    const std::vector<double>& loss_curve() const { return loss_curve_; }

    nlohmann::json to_json() const;
    static QualityClassifier from_json(const nlohmann::json& j);
    void save_file(const std::string& path) const;
    static QualityClassifier load_file(const std::string& path);

private:
    std::vector<double> weights_;
    double bias_ = 0.0;
    std::string provider_id_;
    std::uint64_t seed_ = 0;
    std::vector<double> loss_curve_;
};

struct PruneResult {
    std::vector<std::size_t> kept;    // indices into the input, ascending
    std::vector<std::size_t> dropped; // indices into the input, ascending
};

// Drops the floor(drop_fraction * N) lowest-scoring items. Ties go to the
// earlier item: among equal scores the later one is dropped first. Both
// lists come back in input order. drop_fraction outside [0, 1] throws
// Error(InvalidArgument).
PruneResult prune_lowest(const std::vector<double>& scores, double drop_fraction);

} // namespace sciforge
