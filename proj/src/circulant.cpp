#include "lpsup/circulant.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>

namespace lpsup {

namespace {

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

std::vector<double> circulant_eigenvalues(const std::function<double(std::size_t)>& acov, std::size_t size) {
    const std::size_t half = size / 2;
    fftw_complex* buf = fftw_alloc_complex(size);
    for (std::size_t k = 0; k < size; ++k) {
        const std::size_t lag = k <= half ? k : size - k;
        buf[k][0] = acov(lag);
        buf[k][1] = 0.0;
    }
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(size), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::vector<double> eig(size);
    for (std::size_t k = 0; k < size; ++k) eig[k] = buf[k][0];
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return eig;
}

}  // namespace

CirculantEmbedding::CirculantEmbedding(std::function<double(std::size_t)> acov, std::size_t length)
    : length_(length) {
    if (length == 0) throw std::invalid_argument("sequence length must be positive");
    const std::size_t base = std::max<std::size_t>(2, next_pow2(2 * (length - 1)));
    double worst = 0.0;
    for (std::size_t size = base; size <= base * kMaxPaddingFactor; size *= 2) {
        std::vector<double> eig = circulant_eigenvalues(acov, size);
        const double mx = *std::max_element(eig.begin(), eig.end());
        const double mn = *std::min_element(eig.begin(), eig.end());
        worst = mx > 0.0 ? mn / mx : -1.0;
        if (mx > 0.0 && mn >= -kNegativeEigenTolerance * mx) {
            size_ = size;
            eigen_ = std::move(eig);
            break;
        }
    }
    if (size_ == 0) {
        std::ostringstream msg;
        msg << "circulant embedding is not nonnegative-definite up to size " << base * kMaxPaddingFactor
            << " (min/max eigenvalue ratio " << worst << "); use a larger padding or a shorter grid";
        throw std::runtime_error(msg.str());
    }
    roots_.resize(size_);
    for (std::size_t k = 0; k < size_; ++k) {
        if (eigen_[k] < 0.0) {
            ++clamped_;
            eigen_[k] = 0.0;
        }
        roots_[k] = std::sqrt(eigen_[k] / static_cast<double>(size_));
    }
    if (clamped_ > 0) {
        std::clog << "warning: clamped " << clamped_ << " tiny negative circulant eigenvalues to zero\n";
    }
}

double CirculantEmbedding::implied_covariance(std::size_t lag) const {
    long double s = 0.0L;
    const long double M = static_cast<long double>(size_);
    for (std::size_t j = 0; j < size_; ++j) {
        const long double angle = 2.0L * 3.14159265358979323846264338327950288L * static_cast<long double>(j) *
                                  static_cast<long double>(lag % size_) / M;
        s += static_cast<long double>(eigen_[j]) * std::cos(angle);
    }
    return static_cast<double>(s / M);
}

struct CirculantSampler::Fft {
    fftw_complex* buf = nullptr;
    fftw_plan plan = nullptr;
};

CirculantSampler::CirculantSampler(std::shared_ptr<const CirculantEmbedding> emb)
    : emb_(std::move(emb)), fft_(std::make_unique<Fft>()) {
    const std::size_t size = emb_->embedding_size();
    fft_->buf = fftw_alloc_complex(size);
    std::lock_guard lock(planner_mutex());
    fft_->plan = fftw_plan_dft_1d(static_cast<int>(size), fft_->buf, fft_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
}

CirculantSampler::~CirculantSampler() {
    if (fft_->plan) {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(fft_->plan);
    }
    fftw_free(fft_->buf);
}

void CirculantSampler::sample_pair(NormalSource& normal, std::span<double> first, std::span<double> second) {
    const std::size_t L = emb_->length();
    if (first.size() < L || second.size() < L) throw std::invalid_argument("output spans shorter than the sequence");
    const auto roots = emb_->scaled_roots();
    const std::size_t size = roots.size();
    fftw_complex* buf = fft_->buf;
    for (std::size_t j = 0; j < size; ++j) {
        const double z1 = normal();
        const double z2 = normal();
        buf[j][0] = roots[j] * z1;
        buf[j][1] = roots[j] * z2;
    }
    fftw_execute(fft_->plan);
    for (std::size_t k = 0; k < L; ++k) {
        first[k] = buf[k][0];
        second[k] = buf[k][1];
    }
}

}  // namespace lpsup
