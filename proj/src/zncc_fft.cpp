#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <string>

#include "shredmap/error.hpp"
#include "shredmap/kernels.hpp"
#include "zncc_common.hpp"

namespace shredmap::kernels {

namespace {

// The FFTW planner is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

template <typename T>
struct FftwBuffer {
    explicit FftwBuffer(std::size_t n) : data(static_cast<T*>(fftw_malloc(sizeof(T) * n))), size(n) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    T* data;
    std::size_t size;
};

}  // namespace

int fft_size(int n) {
    // FFTW is markedly faster on lengths dominated by factors of two.
    int best = 0;
    for (int c : {1, 3, 5, 7, 9, 15}) {
        long long m = c;
        while (m < n) m *= 2;
        if (best == 0 || m < best) best = static_cast<int>(m);
    }
    return best;
}

struct FftCorrelator::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

FftCorrelator::FftCorrelator(int padded_width, int padded_height)
    : pw_(padded_width), ph_(padded_height), plans_(std::make_unique<Plans>()) {
    if (pw_ <= 0 || ph_ <= 0) throw Error("invalid FFT grid");
    const std::size_t nreal = static_cast<std::size_t>(pw_) * ph_;
    const std::size_t ncplx = static_cast<std::size_t>(pw_ / 2 + 1) * ph_;
    FftwBuffer<double> real(nreal);
    FftwBuffer<fftw_complex> cplx(ncplx);
    // FFTW_ESTIMATE keeps the plan, and so every rounding, identical from run
    // to run. All execution buffers are 64-byte aligned like the planning ones.
    const unsigned flags = FFTW_ESTIMATE;
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_r2c_2d(ph_, pw_, real.data, cplx.data, flags);
    plans_->backward = fftw_plan_dft_c2r_2d(ph_, pw_, cplx.data, real.data, flags);
    if (!plans_->forward || !plans_->backward) throw Error("FFTW planning failed");
}

FftCorrelator::~FftCorrelator() {
    std::lock_guard lock(planner_mutex());
    if (plans_->forward) fftw_destroy_plan(plans_->forward);
    if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

namespace {

FftCorrelator::Spectrum forward_padded(fftw_plan plan, int pw, int ph, const double* src, int w,
                                       int h) {
    std::vector<double, AlignedAllocator<double>> real(static_cast<std::size_t>(pw) * ph, 0.0);
    for (int y = 0; y < h; ++y) {
        std::copy_n(src + static_cast<std::size_t>(y) * w, w, real.begin() + static_cast<std::ptrdiff_t>(y) * pw);
    }
    FftCorrelator::Spectrum spec(static_cast<std::size_t>(pw / 2 + 1) * ph);
    fftw_execute_dft_r2c(plan, real.data(), reinterpret_cast<fftw_complex*>(spec.data()));
    return spec;
}

}  // namespace

FftCorrelator::Spectrum FftCorrelator::image_spectrum(const GrayImage& image) const {
    if (image.width() > pw_ || image.height() > ph_) throw Error("image exceeds FFT grid");
    return forward_padded(plans_->forward, pw_, ph_, image.values().data(), image.width(),
                          image.height());
}

FftCorrelator::Spectrum FftCorrelator::template_spectrum(const TemplateStats& t) const {
    if (t.width() > pw_ || t.height() > ph_) throw Error("template exceeds FFT grid");
    Spectrum spec = forward_padded(plans_->forward, pw_, ph_, t.zero_mean.values().data(),
                                   t.width(), t.height());
    const double scale = 1.0 / (static_cast<double>(pw_) * ph_);
    for (auto& c : spec) c = std::conj(c) * scale;
    return spec;
}

void FftCorrelator::correlate(const Spectrum& image_spec, const Spectrum& template_spec, Grid& out) const {
    const std::size_t n = static_cast<std::size_t>(pw_ / 2 + 1) * ph_;
    if (image_spec.size() != n || template_spec.size() != n) throw Error("spectrum does not match FFT grid");
    // c2r overwrites its input, so the product needs its own buffer.
    thread_local Spectrum product;
    product.resize(n);
    const double* a = reinterpret_cast<const double*>(image_spec.data());
    const double* b = reinterpret_cast<const double*>(template_spec.data());
    double* p = reinterpret_cast<double*>(product.data());
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[2 * i], ai = a[2 * i + 1], br = b[2 * i], bi = b[2 * i + 1];
        p[2 * i] = ar * br - ai * bi;
        p[2 * i + 1] = ar * bi + ai * br;
    }
    out.resize(static_cast<std::size_t>(pw_) * ph_);
    fftw_execute_dft_c2r(plans_->backward, reinterpret_cast<fftw_complex*>(product.data()), out.data());
}

ScoreMap FftCorrelator::score(const Spectrum& image_spec, const Spectrum& template_spec,
                              const GrayImage& image, const IntegralImage& tables,
                              const TemplateStats& t) const {
    detail::check_fits(image, t);
    ScoreMap out{image.width() - t.width() + 1, image.height() - t.height() + 1, {}};
    out.values.assign(static_cast<std::size_t>(out.width) * out.height, 0.0);
    if (t.degenerate()) return out;

    Grid corr;
    correlate(image_spec, template_spec, corr);
    const int tw = t.width();
    const int th = t.height();
    const long long n = static_cast<long long>(tw) * th;
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            out.values[static_cast<std::size_t>(y) * out.width + x] =
                zncc_from_moments(corr[static_cast<std::size_t>(y) * pw_ + x],
                                  window_deviation_sq(image, tables, x, y, tw, th), n, t);
        }
    }
    return out;
}

ScoreMap zncc_fft(const GrayImage& image, const IntegralImage& tables, const TemplateStats& t) {
    detail::check_fits(image, t);
    const FftCorrelator fft(fft_size(image.width()), fft_size(image.height()));
    return fft.score(fft.image_spectrum(image), fft.template_spectrum(t), image, tables, t);
}

}  // namespace shredmap::kernels
