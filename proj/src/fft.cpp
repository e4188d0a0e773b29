#include "vspike/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace vspike {

namespace {

std::mutex plan_mutex;

struct PlanPair {
    fftw_plan fwd;
    fftw_plan bwd;
};

// One plan pair per size, created with scratch buffers and reused with
// new-array execution.  FFTW_UNALIGNED keeps the plans valid for arbitrary
// caller buffers.
PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    double* re = fftw_alloc_real(n);
    fftw_complex* cx = fftw_alloc_complex(n / 2 + 1);
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c_1d(n, re, cx, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_c2r_1d(n, cx, re, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(re);
    fftw_free(cx);
    if (!p.fwd || !p.bwd) throw std::runtime_error("fft: plan creation failed");
    return cache.emplace(n, p).first->second;
}

} // namespace

Rfft::Rfft(int n) : n_(n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("Rfft: n must be even and >= 2");
    PlanPair& p = plans_for(n);
    plan_fwd_ = p.fwd;
    plan_bwd_ = p.bwd;
}

void Rfft::forward(const double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void Rfft::inverse(const std::complex<double>* in, double* out) const {
    // c2r destroys its input; work on a copy
    std::vector<std::complex<double>> tmp(in, in + nmodes());
    fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_bwd_),
                         reinterpret_cast<fftw_complex*>(tmp.data()), out);
    const double inv = 1.0 / n_;
    for (int i = 0; i < n_; ++i) out[i] *= inv;
}

} // namespace vspike
