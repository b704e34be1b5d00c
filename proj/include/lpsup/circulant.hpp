#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "lpsup/rng.hpp"

namespace lpsup {

/// Circulant embedding of a stationary Gaussian sequence of length L with
/// autocovariance gamma(k).
///
/// The embedding size starts at the smallest power of two >= 2(L-1) and is
/// doubled up to 16 times that on failure. Eigenvalues below
/// -kNegativeEigenTolerance * max are fatal; smaller negatives are clamped to
/// zero with a warning on std::clog.
class CirculantEmbedding {
public:
    static constexpr double kNegativeEigenTolerance = 1e-9;
    static constexpr std::size_t kMaxPaddingFactor = 16;

    CirculantEmbedding(std::function<double(std::size_t)> acov, std::size_t length);

    std::size_t length() const noexcept { return length_; }
    std::size_t embedding_size() const noexcept { return size_; }
    std::size_t clamped_count() const noexcept { return clamped_; }

    /// Covariance at `lag` of the sequence the sampler actually produces.
    double implied_covariance(std::size_t lag) const;

    /// sqrt(lambda_j / M), j = 0..M-1.
    std::span<const double> scaled_roots() const noexcept { return roots_; }

private:
    std::size_t length_;
    std::size_t size_ = 0;
    std::size_t clamped_ = 0;
    std::vector<double> eigen_;
    std::vector<double> roots_;
};

/// Per-thread FFT workspace bound to one embedding.
class CirculantSampler {
public:
    explicit CirculantSampler(std::shared_ptr<const CirculantEmbedding> emb);
    ~CirculantSampler();
    CirculantSampler(const CirculantSampler&) = delete;
    CirculantSampler& operator=(const CirculantSampler&) = delete;

    /// Two independent draws of the length-L sequence.
    void sample_pair(NormalSource& normal, std::span<double> first, std::span<double> second);

    const CirculantEmbedding& embedding() const noexcept { return *emb_; }

private:
    std::shared_ptr<const CirculantEmbedding> emb_;
    struct Fft;
    std::unique_ptr<Fft> fft_;
};

}  // namespace lpsup
