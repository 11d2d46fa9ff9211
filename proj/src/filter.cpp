#include "sciforge/filter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>

#ifdef SCIFORGE_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "sciforge/errors.hpp"
#include "sciforge/util.hpp"

namespace sciforge {

static_assert(std::endian::native == std::endian::little,
              "weight serialization assumes a little-endian host");

// ---------------------------------------------------------------------------
// HashedNgramProvider

HashedNgramProvider::HashedNgramProvider(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
    if (dim_ == 0) throw Error(Errc::InvalidArgument, "embedding dimension must be positive");
}

std::string HashedNgramProvider::id() const {
    return "hashed-ngram-v1/d" + std::to_string(dim_) + "/s" + std::to_string(seed_);
}

SparseVec HashedNgramProvider::embed(const std::string& text) {
    std::map<std::uint32_t, double> counts; // ordered: output is index-sorted
    auto bump = [&](std::string_view gram) {
        counts[static_cast<std::uint32_t>(util::fnv1a64(gram, seed_) % dim_)] += 1.0;
    };
    if (text.size() < 2) {
        if (!text.empty()) bump(text);
    } else {
        for (std::size_t n = 2; n <= 3; ++n)
            for (std::size_t i = 0; i + n <= text.size(); ++i)
                bump(std::string_view(text).substr(i, n));
    }

    double norm_sq = 0.0;
    for (const auto& [idx, v] : counts) norm_sq += v * v;
    double inv = norm_sq > 0.0 ? 1.0 / std::sqrt(norm_sq) : 0.0;

    SparseVec vec;
    vec.reserve(counts.size());
    for (const auto& [idx, v] : counts) vec.emplace_back(idx, v * inv);
    return vec;
}

// ---------------------------------------------------------------------------
// RemoteEmbeddingProvider

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string endpoint, std::size_t dim,
                                                 int timeout_seconds)
    : endpoint_(std::move(endpoint)), dim_(dim), timeout_seconds_(timeout_seconds) {
    if (dim_ == 0) throw Error(Errc::InvalidArgument, "embedding dimension must be positive");
}

std::string RemoteEmbeddingProvider::id() const {
    return "remote/" + endpoint_ + "/d" + std::to_string(dim_);
}

SparseVec RemoteEmbeddingProvider::embed(const std::string& text) {
    std::string rest;
    if (endpoint_.rfind("http://", 0) == 0) {
        rest = endpoint_.substr(7);
    } else {
        throw Error(Errc::ProviderError, "embedding endpoint must start with http://");
    }
    std::size_t slash = rest.find('/');
    std::string host = slash == std::string::npos ? rest : rest.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);

    httplib::Client client(host);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);

    nlohmann::json body{{"input", text}};
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res || res->status != 200)
        throw Error(Errc::ProviderError,
                    "embedding endpoint failed" +
                        (res ? " with status " + std::to_string(res->status) : std::string()));
    try {
        nlohmann::json j = nlohmann::json::parse(res->body);
        std::vector<double> dense = j.at("embedding").get<std::vector<double>>();
        if (dense.size() != dim_)
            throw Error(Errc::ProviderError,
                        "embedding has dimension " + std::to_string(dense.size()) + ", expected " +
                            std::to_string(dim_));
        double norm_sq = 0.0;
        for (double v : dense) norm_sq += v * v;
        double inv = norm_sq > 1.0 ? 1.0 / std::sqrt(norm_sq) : 1.0;
        SparseVec vec;
        for (std::size_t i = 0; i < dense.size(); ++i)
            if (dense[i] != 0.0)
                vec.emplace_back(static_cast<std::uint32_t>(i), dense[i] * inv);
        return vec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ProviderError, std::string("malformed embedding payload: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// QualityClassifier

namespace {
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double dot_sparse(const std::vector<double>& w, const SparseVec& x) {
    double z = 0.0;
    for (const auto& [idx, v] : x) z += w[idx] * v;
    return z;
}
} // namespace

QualityClassifier QualityClassifier::train(EmbeddingProvider& provider,
                                           const std::vector<std::string>& positives,
                                           const std::vector<std::string>& negatives,
                                           const TrainOptions& options) {
    if (positives.empty() || negatives.empty())
        throw Error(Errc::DegenerateData,
                    "training needs at least one example of each class (got " +
                        std::to_string(positives.size()) + " positive, " +
                        std::to_string(negatives.size()) + " negative)");

    std::vector<SparseVec> xs;
    std::vector<double> ys;
    xs.reserve(positives.size() + negatives.size());
    for (const auto& t : positives) {
        xs.push_back(provider.embed(t));
        ys.push_back(1.0);
    }
    for (const auto& t : negatives) {
        xs.push_back(provider.embed(t));
        ys.push_back(0.0);
    }

    const std::size_t n = xs.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    QualityClassifier clf;
    clf.weights_.assign(provider.dim(), 0.0);
    clf.bias_ = 0.0;
    clf.provider_id_ = provider.id();
    clf.loss_curve_.reserve(options.epochs);

    std::vector<double> grad(provider.dim());
    std::vector<double> residual(n);
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double p = sigmoid(dot_sparse(clf.weights_, xs[i]) + clf.bias_);
            double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
            loss -= ys[i] * std::log(pc) + (1.0 - ys[i]) * std::log(1.0 - pc);
            residual[i] = p - ys[i];
            grad_b += residual[i];
        }
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& [idx, v] : xs[i]) grad[idx] += residual[i] * v;

        for (std::size_t d = 0; d < clf.weights_.size(); ++d)
            clf.weights_[d] -= options.learning_rate * grad[d] * inv_n;
        clf.bias_ -= options.learning_rate * grad_b * inv_n;
        clf.loss_curve_.push_back(loss * inv_n);
    }
    return clf;
}

double QualityClassifier::score_embedded(const SparseVec& vec) const {
    for (const auto& [idx, v] : vec) {
        (void)v;
        if (idx >= weights_.size())
            throw Error(Errc::DimensionMismatch,
                        "embedding index " + std::to_string(idx) + " exceeds model dimension " +
                            std::to_string(weights_.size()));
    }
    // 2*sigmoid(z) - 1 == tanh(z/2). The true value is strictly inside
    // (-1, 1); keep the reported one there even where doubles saturate.
    double raw = std::tanh(0.5 * (dot_sparse(weights_, vec) + bias_));
    return std::clamp(raw, std::nextafter(-1.0, 0.0), std::nextafter(1.0, 0.0));
}

double QualityClassifier::score_text(EmbeddingProvider& provider, const std::string& text) const {
    if (provider.dim() != weights_.size())
        throw Error(Errc::DimensionMismatch,
                    "provider dimension " + std::to_string(provider.dim()) +
                        " does not match model dimension " + std::to_string(weights_.size()));
    return score_embedded(provider.embed(text));
}

nlohmann::json QualityClassifier::to_json() const {
    const auto* bytes = reinterpret_cast<const unsigned char*>(weights_.data());
    return nlohmann::json{{"dim", weights_.size()},
                          {"weights", util::base64_encode(bytes, weights_.size() * sizeof(double))},
                          {"bias", bias_},
                          {"seed", seed_},
                          {"provider_id", provider_id_}};
}

QualityClassifier QualityClassifier::from_json(const nlohmann::json& j) {
    QualityClassifier clf;
    std::size_t dim;
    try {
        dim = j.at("dim").get<std::size_t>();
        clf.bias_ = j.at("bias").get<double>();
        clf.seed_ = j.value("seed", std::uint64_t(0));
        clf.provider_id_ = j.at("provider_id").get<std::string>();
        std::vector<unsigned char> bytes = util::base64_decode(j.at("weights").get<std::string>());
        if (bytes.size() != dim * sizeof(double))
            throw Error(Errc::DimensionMismatch,
                        "weight blob holds " + std::to_string(bytes.size() / sizeof(double)) +
                            " values for a dimension-" + std::to_string(dim) + " model");
        clf.weights_.resize(dim);
        std::memcpy(clf.weights_.data(), bytes.data(), bytes.size());
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("bad classifier payload: ") + e.what());
    }
    return clf;
}

void QualityClassifier::save_file(const std::string& path) const {
    util::atomic_write_file(path, to_json().dump(2) + "\n");
}

QualityClassifier QualityClassifier::load_file(const std::string& path) {
    try {
        return from_json(nlohmann::json::parse(util::read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, "bad classifier file " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Pruning

PruneResult prune_lowest(const std::vector<double>& scores, double drop_fraction) {
    if (!(drop_fraction >= 0.0 && drop_fraction <= 1.0))
        throw Error(Errc::InvalidArgument,
                    "drop fraction must be in [0, 1], got " + std::to_string(drop_fraction));

    const std::size_t n = scores.size();
    // floor(f*N) of the intended real product: a hair of slack keeps
    // decimal fractions like 0.3 * 10 from flooring to 2.
    const auto k =
        static_cast<std::size_t>(std::floor(drop_fraction * static_cast<double>(n) + 1e-9));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Lowest scores first; among equals the later item goes first, so the
    // earlier one survives.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a > b;
    });

    PruneResult result;
    result.dropped.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    result.kept.assign(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    std::sort(result.dropped.begin(), result.dropped.end());
    std::sort(result.kept.begin(), result.kept.end());
    return result;
}

} // namespace sciforge
