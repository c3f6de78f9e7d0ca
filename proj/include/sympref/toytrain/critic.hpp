#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sympref/grader.hpp"
#include "sympref/prefdata.hpp"

namespace sympref::toytrain {

inline constexpr int kCriticDim = 4096;
inline constexpr std::uint64_t kCriticHashSeed = 0x5379'6d50'7265'6631ull;

// Linear ordinal classifier over hashed token uni+bigram counts. The
// desk-scale reward model: same contract as a learned judge (source
// text in, one of four categories out), none of the scale.
struct CriticModel {
  int dim = kCriticDim;
  std::vector<double> weights;  // 4 x dim, row-major by category
  std::array<double, 4> bias{};

  double& w(int category, int feature) {
    return weights[static_cast<std::size_t>(category) * static_cast<std::size_t>(dim) +
                   static_cast<std::size_t>(feature)];
  }
  double w(int category, int feature) const {
    return weights[static_cast<std::size_t>(category) * static_cast<std::size_t>(dim) +
                   static_cast<std::size_t>(feature)];
  }
};

inline CriticModel make_critic(int dim = kCriticDim) {
  CriticModel m;
  m.dim = dim;
  m.weights.assign(4 * static_cast<std::size_t>(dim), 0.0);
  return m;
}

namespace detail {

// Tolerant tokenizer: any source text gets a token stream, even text the
// real lexer rejects, so every candidate is featurizable.
inline std::vector<std::string> feature_tokens(std::string_view src) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      out.emplace_back(src.substr(i, j - i));
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.emplace_back(src.substr(i, j - i));
      i = j;
      continue;
    }
    if (i + 1 < src.size() && src[i + 1] == '=' &&
        (c == '=' || c == '!' || c == '<' || c == '>')) {
      out.emplace_back(src.substr(i, 2));
      i += 2;
      continue;
    }
    out.emplace_back(src.substr(i, 1));
    ++i;
  }
  return out;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

// Sparse hashed feature vector: token unigrams and bigrams, counted.
inline std::vector<std::pair<int, double>> featurize(const std::string& source, int dim) {
  const auto tokens = detail::feature_tokens(source);
  std::vector<double> dense(static_cast<std::size_t>(dim), 0.0);
  auto bump = [&](std::string_view key) {
    dense[detail::fnv1a(key, kCriticHashSeed) % static_cast<std::uint64_t>(dim)] += 1.0;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    bump(tokens[i]);
    if (i + 1 < tokens.size()) bump(tokens[i] + "\x1f" + tokens[i + 1]);
  }
  std::vector<std::pair<int, double>> sparse;
  for (int i = 0; i < dim; ++i)
    if (dense[static_cast<std::size_t>(i)] != 0.0)
      sparse.emplace_back(i, dense[static_cast<std::size_t>(i)]);
  return sparse;
}

inline std::array<double, 4> critic_probabilities(
    const CriticModel& model, const std::vector<std::pair<int, double>>& feats) {
  std::array<double, 4> logits = model.bias;
  for (const auto& [idx, count] : feats)
    for (int c = 0; c < 4; ++c) logits[static_cast<std::size_t>(c)] += model.w(c, idx) * count;
  const double max_l = std::max({logits[0], logits[1], logits[2], logits[3]});
  std::array<double, 4> p{};
  double z = 0.0;
  for (int c = 0; c < 4; ++c) z += p[static_cast<std::size_t>(c)] = std::exp(logits[static_cast<std::size_t>(c)] - max_l);
  for (auto& v : p) v /= z;
  return p;
}

struct CriticPrediction {
  GradeCategory category = GradeCategory::CompileError;
  std::array<double, 4> probabilities{};
};

// Argmax category; ties break toward the lower ordinal (pessimistic).
inline CriticPrediction predict(const CriticModel& model, const std::string& source) {
  CriticPrediction out;
  out.probabilities = critic_probabilities(model, featurize(source, model.dim));
  int best = 0;
  for (int c = 1; c < 4; ++c)
    if (out.probabilities[static_cast<std::size_t>(c)] >
        out.probabilities[static_cast<std::size_t>(best)])
      best = c;
  out.category = static_cast<GradeCategory>(best);
  return out;
}

// Featurized training set: hashed sparse vectors plus ordinal labels.
struct CriticBatch {
  std::vector<std::vector<std::pair<int, double>>> features;
  std::vector<int> labels;
};

inline CriticBatch featurize_batch(const std::vector<CodeFeedbackPair>& pairs, int dim) {
  CriticBatch batch;
  batch.features.reserve(pairs.size());
  batch.labels.reserve(pairs.size());
  for (const auto& p : pairs) {
    batch.features.push_back(featurize(p.source, dim));
    batch.labels.push_back(ordinal(p.category));
  }
  return batch;
}

// Mean cross-entropy and its gradient in one pass. grad_w/grad_b are
// overwritten. This is the single source of the critic's calculus: training
// steps and the finite-difference checks both go through it.
inline double critic_loss_and_grad(const CriticModel& model, const CriticBatch& batch,
                                   std::vector<double>& grad_w,
                                   std::array<double, 4>& grad_b) {
  grad_w.assign(model.weights.size(), 0.0);
  grad_b = {};
  const double inv_n = 1.0 / static_cast<double>(batch.labels.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.labels.size(); ++i) {
    const auto p = critic_probabilities(model, batch.features[i]);
    const int label = batch.labels[i];
    loss -= std::log(std::max(p[static_cast<std::size_t>(label)], 1e-300));
    for (int c = 0; c < 4; ++c) {
      const double g =
          (p[static_cast<std::size_t>(c)] - (c == label ? 1.0 : 0.0)) * inv_n;
      grad_b[static_cast<std::size_t>(c)] += g;
      for (const auto& [idx, count] : batch.features[i])
        grad_w[static_cast<std::size_t>(c) * static_cast<std::size_t>(model.dim) +
               static_cast<std::size_t>(idx)] += g * count;
    }
  }
  return loss * inv_n;
}

inline double critic_loss(const CriticModel& model, const CriticBatch& batch) {
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.labels.size(); ++i) {
    const auto p = critic_probabilities(model, batch.features[i]);
    loss -= std::log(
        std::max(p[static_cast<std::size_t>(batch.labels[i])], 1e-300));
  }
  return loss / static_cast<double>(batch.labels.size());
}

struct CriticTrainResult {
  CriticModel model;
  std::vector<double> loss_curve;  // mean cross-entropy before each step
};

// Full-batch gradient descent on multinomial cross-entropy. Deterministic:
// fixed iteration order, fixed hash seed, no sampling.
inline CriticTrainResult train_critic(const std::vector<CodeFeedbackPair>& pairs,
                                      int epochs, double learning_rate,
                                      int dim = kCriticDim) {
  if (pairs.empty()) throw DomainError("cannot train a critic on zero pairs");
  CriticTrainResult result;
  result.model = make_critic(dim);
  CriticModel& model = result.model;
  const CriticBatch batch = featurize_batch(pairs, dim);

  std::vector<double> grad_w;
  std::array<double, 4> grad_b{};
  for (int epoch = 0; epoch < epochs; ++epoch) {
    result.loss_curve.push_back(critic_loss_and_grad(model, batch, grad_w, grad_b));
    for (std::size_t j = 0; j < model.weights.size(); ++j)
      model.weights[j] -= learning_rate * grad_w[j];
    for (int c = 0; c < 4; ++c)
      model.bias[static_cast<std::size_t>(c)] -=
          learning_rate * grad_b[static_cast<std::size_t>(c)];
  }
  return result;
}

}  // namespace sympref::toytrain
