#pragma once

// Zero-normalized cross-correlation kernels.
//
// All kernels compute, for every top-left (x, y) where the template fits:
//
//   score = sum((T - mean T) * (I - mean I)) / sqrt(sum((T - mean T)^2) * sum((I - mean I)^2))
//
// The window statistics of I come from summed-area tables; only the
// numerator differs between kernels. Windows (or templates) whose
// per-pixel variance is below kZeroVariance score 0.
//
//   zncc_reference  serial direct numerator; the baseline the others are tested against
//   zncc_parallel   same arithmetic, rows split across OpenMP threads (bit-identical)
//   zncc_fft        numerator from an FFT cross-correlation (FFTW)

#include <cmath>
#include <complex>
#include <memory>
#include <new>
#include <vector>

#include "shredmap/image.hpp"

namespace shredmap {

inline constexpr double kZeroVariance = 1e-10;

struct ScoreMap {
    int width = 0;   // number of valid x positions
    int height = 0;  // number of valid y positions
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Template with its mean removed, plus the sum of squared deviations.
struct TemplateStats {
    GrayImage zero_mean;
    double norm_sq = 0.0;

    int width() const { return zero_mean.width(); }
    int height() const { return zero_mean.height(); }
    bool degenerate() const;
};

TemplateStats template_stats(const GrayImage& tmpl);

inline constexpr double kCancellationGuard = 1e-8;

namespace detail {
double window_deviation_sq_direct(const GrayImage& image, const IntegralImage& tables, int x, int y,
                                  int w, int h);
}

// Sum of squared deviations from the mean over a window. Taken from the
// tables unless cancellation could cost more than ~1e-8 relative, in which
// case it is recomputed directly; exactly constant windows give 0.
inline double window_deviation_sq(const GrayImage& image, const IntegralImage& tables, int x, int y,
                                  int w, int h) {
    const double n = static_cast<double>(w) * h;
    const double sum = tables.rect_sum(x, y, w, h);
    const double dev = tables.rect_sumsq(x, y, w, h) - sum * sum / n;
    // Rounding in the table entries is proportional to their magnitude.
    const double scale = tables.sumsq_entry(x + w, y + h) + std::abs(tables.sum_entry(x + w, y + h) * sum / n);
    if (dev > kCancellationGuard * scale) return dev;
    return detail::window_deviation_sq_direct(image, tables, x, y, w, h);
}

// Score from the numerator and the window's sum of squared deviations.
double zncc_from_moments(double numerator, double window_dev_sq, long long n, const TemplateStats& t);

// Score of a single placement, direct numerator.
double zncc_at(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t, int x,
               int y);

namespace kernels {

// 64-byte aligned storage, so FFTW may use its SIMD code paths.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t kAlign{64};

    AlignedAllocator() = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
    void deallocate(T* p, std::size_t) { ::operator delete(p, kAlign); }

    template <typename U>
    friend bool operator==(const AlignedAllocator&, const AlignedAllocator<U>&) {
        return true;
    }
};

ScoreMap zncc_reference(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t);

ScoreMap zncc_parallel(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t);

ScoreMap zncc_fft(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t);

// Smallest n' >= n of the form c * 2^k with c in {1, 3, 5, 7, 9, 15}.
int fft_size(int n);

// Cross-correlation through FFTW on a fixed padded grid. Image and template
// spectra can be computed once and reused across many pairings. Instances
// are safe to share between threads; spectra are plain values.
class FftCorrelator {
public:
    using Spectrum = std::vector<std::complex<double>, AlignedAllocator<std::complex<double>>>;

    FftCorrelator(int padded_width, int padded_height);
    ~FftCorrelator();
    FftCorrelator(const FftCorrelator&) = delete;
    FftCorrelator& operator=(const FftCorrelator&) = delete;

    int padded_width() const { return pw_; }
    int padded_height() const { return ph_; }

    Spectrum image_spectrum(const GrayImage& image) const;
    // Conjugated, scaled so that correlate() needs no further normalization.
    Spectrum template_spectrum(const TemplateStats& t) const;

    using Grid = std::vector<double, AlignedAllocator<double>>;

    // Raw cross-correlation of image and template; entry (x, y) of the
    // padded_width-strided grid is the numerator for placement (x, y).
    void correlate(const Spectrum& image_spec, const Spectrum& template_spec, Grid& out) const;

    // Scores every valid placement of `t` in `image`.
    ScoreMap score(const Spectrum& image_spec, const Spectrum& template_spec,
                   const GrayImage& image, const IntegralImage& tables,
                   const TemplateStats& t) const;

private:
    struct Plans;
    int pw_;
    int ph_;
    std::unique_ptr<Plans> plans_;
};

}  // namespace kernels
}  // namespace shredmap
