#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "fkdv/errors.hpp"

namespace fkdv {

/// Smallest n >= target whose prime factors are all in {2, 3, 5, 7}.
/// FFTW stays O(n log n) for such sizes.
inline int next_fast_size(int target) {
    if (target < 1) return 1;
    for (int n = target;; ++n) {
        int m = n;
        for (int p : {2, 3, 5, 7})
            while (m % p == 0) m /= p;
        if (m == 1) return n;
    }
}

/// Complex-to-complex FFT of a fixed size with owned buffers.
///
/// Plans are cached per size for the process lifetime; FFTW's planner mutates
/// global state, so creation is serialized behind a mutex. Execution uses the
/// new-array interface on per-instance fftw-aligned buffers, which is safe
/// concurrently across instances. Data is copied through the internal buffer,
/// keeping callers free to use ordinary std::vector storage.
class Fft {
  public:
    explicit Fft(int n) : n_(n), plans_(plans_for(n)) {
        buf_ = fftw_alloc_complex(static_cast<size_t>(n));
    }

    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    ~Fft() { fftw_free(buf_); }

    int size() const { return n_; }

    /// out[m] = sum_j in[j] e^{-2 pi i j m / n}  (unnormalized)
    void forward(std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out) {
        execute(in, out, plans_->fwd);
    }

    /// out[j] = sum_m in[m] e^{+2 pi i j m / n}  (unnormalized)
    void backward(std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out) {
        execute(in, out, plans_->bwd);
    }

  private:
    struct PlanPair {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
        fftw_complex* proto = nullptr; // buffer the plans were created on
        ~PlanPair() {
            // Process-lifetime cache entries; destroyed only at exit.
            if (fwd) fftw_destroy_plan(fwd);
            if (bwd) fftw_destroy_plan(bwd);
            if (proto) fftw_free(proto);
        }
    };

    static std::shared_ptr<PlanPair> plans_for(int n) {
        if (n < 1) throw ParameterError("Fft: size must be positive");
        static std::mutex mutex;
        static std::map<int, std::shared_ptr<PlanPair>> cache;
        std::lock_guard<std::mutex> lock(mutex);
        auto& entry = cache[n];
        if (!entry) {
            entry = std::make_shared<PlanPair>();
            entry->proto = fftw_alloc_complex(static_cast<size_t>(n));
            entry->fwd = fftw_plan_dft_1d(n, entry->proto, entry->proto,
                                          FFTW_FORWARD, FFTW_ESTIMATE);
            entry->bwd = fftw_plan_dft_1d(n, entry->proto, entry->proto,
                                          FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        return entry;
    }

    void execute(std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out, fftw_plan plan) {
        if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != n_)
            throw DimensionError("Fft: buffer length does not match plan size");
        for (int i = 0; i < n_; ++i) {
            buf_[i][0] = in[i].real();
            buf_[i][1] = in[i].imag();
        }
        fftw_execute_dft(plan, buf_, buf_);
        for (int i = 0; i < n_; ++i) out[i] = {buf_[i][0], buf_[i][1]};
    }

    int n_;
    std::shared_ptr<PlanPair> plans_;
    fftw_complex* buf_;
};

} // namespace fkdv
