#include "blwave/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace blwave {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void* fft_alloc(std::size_t bytes) {
    void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
    if (!p) throw std::bad_alloc();
    return p;
}

void fft_free(void* p) noexcept { fftw_free(p); }

Fft2D::Fft2D(int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx < 2 || ny < 1) throw std::invalid_argument("Fft2D: bad size");
    RealVec r(real_size());
    ComplexVec c(spec_size());
    std::lock_guard<std::mutex> lk(planner_mutex());
    auto* cc = reinterpret_cast<fftw_complex*>(c.data());
    fwd_ = fftw_plan_dft_r2c_2d(ny, nx, r.data(), cc, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_2d(ny, nx, cc, r.data(), FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw std::runtime_error("Fft2D: planning failed");
}

Fft2D::~Fft2D() {
    std::lock_guard<std::mutex> lk(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void Fft2D::forward(const RealVec& in, ComplexVec& out) const {
    if (in.size() != real_size()) throw std::invalid_argument("Fft2D::forward: size mismatch");
    out.resize(spec_size());
    // r2c does not modify its input, the cast only satisfies the C signature.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void Fft2D::inverse(const ComplexVec& in, RealVec& out) const {
    if (in.size() != spec_size()) throw std::invalid_argument("Fft2D::inverse: size mismatch");
    ComplexVec scratch(in);
    out.resize(real_size());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_),
                         reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double s = 1.0 / double(real_size());
    for (auto& v : out) v *= s;
}

Fft1D::Fft1D(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("Fft1D: bad size");
    ComplexVec a(n), b(n);
    std::lock_guard<std::mutex> lk(planner_mutex());
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    fwd_ = fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !inv_) throw std::runtime_error("Fft1D: planning failed");
}

Fft1D::~Fft1D() {
    std::lock_guard<std::mutex> lk(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void Fft1D::forward(const ComplexVec& in, ComplexVec& out) const {
    if (int(in.size()) != n_) throw std::invalid_argument("Fft1D::forward: size mismatch");
    ComplexVec src(in);
    out.resize(n_);
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

void Fft1D::inverse(const ComplexVec& in, ComplexVec& out) const {
    if (int(in.size()) != n_) throw std::invalid_argument("Fft1D::inverse: size mismatch");
    ComplexVec src(in);
    out.resize(n_);
    fftw_execute_dft(static_cast<fftw_plan>(inv_), reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double s = 1.0 / n_;
    for (auto& v : out) v *= s;
}

std::shared_ptr<const Fft2D> fft2d_plan(int nx, int ny) {
    static std::mutex m;
    static std::map<std::pair<int, int>, std::weak_ptr<const Fft2D>> cache;
    std::lock_guard<std::mutex> lk(m);
    auto& slot = cache[{nx, ny}];
    if (auto p = slot.lock()) return p;
    auto p = std::make_shared<const Fft2D>(nx, ny);
    slot = p;
    return p;
}

std::shared_ptr<const Fft1D> fft1d_plan(int n) {
    static std::mutex m;
    static std::map<int, std::weak_ptr<const Fft1D>> cache;
    std::lock_guard<std::mutex> lk(m);
    auto& slot = cache[n];
    if (auto p = slot.lock()) return p;
    auto p = std::make_shared<const Fft1D>(n);
    slot = p;
    return p;
}

}  // namespace blwave
