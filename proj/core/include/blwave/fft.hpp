#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <vector>

namespace blwave {

using cplx = std::complex<double>;

void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;

// Allocator returning FFTW-aligned storage so new-array execution is valid.
template <class T>
struct FftAllocator {
    using value_type = T;
    FftAllocator() = default;
    template <class U>
    FftAllocator(const FftAllocator<U>&) noexcept {}
    T* allocate(std::size_t n) { return static_cast<T*>(fft_alloc(n * sizeof(T))); }
    void deallocate(T* p, std::size_t) noexcept { fft_free(p); }
    template <class U>
    bool operator==(const FftAllocator<U>&) const noexcept { return true; }
};

using RealVec = std::vector<double, FftAllocator<double>>;
using ComplexVec = std::vector<cplx, FftAllocator<cplx>>;

// Real 2D transform on an Ny x Nx array with x fastest. The half spectrum
// has Ny x (Nx/2+1) entries. Forward is unnormalized, inverse divides by Nx*Ny.
// Execution is thread safe; plan creation is serialized internally.
class Fft2D {
public:
    Fft2D(int nx, int ny);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nxh() const { return nx_ / 2 + 1; }
    std::size_t real_size() const { return std::size_t(nx_) * ny_; }
    std::size_t spec_size() const { return std::size_t(nxh()) * ny_; }

    void forward(const RealVec& in, ComplexVec& out) const;
    // `in` is left untouched; a scratch copy is made.
    void inverse(const ComplexVec& in, RealVec& out) const;

private:
    int nx_, ny_;
    void* fwd_ = nullptr;
    void* inv_ = nullptr;
};

// Complex 1D transform of length n. Forward unnormalized, inverse divides by n.
class Fft1D {
public:
    explicit Fft1D(int n);
    ~Fft1D();
    Fft1D(const Fft1D&) = delete;
    Fft1D& operator=(const Fft1D&) = delete;

    int size() const { return n_; }
    void forward(const ComplexVec& in, ComplexVec& out) const;
    void inverse(const ComplexVec& in, ComplexVec& out) const;

private:
    int n_;
    void* fwd_ = nullptr;
    void* inv_ = nullptr;
};

// Cached plans keyed by size.
std::shared_ptr<const Fft2D> fft2d_plan(int nx, int ny);
std::shared_ptr<const Fft1D> fft1d_plan(int n);

}  // namespace blwave
