#ifndef VSPIKE_FFT_HPP
#define VSPIKE_FFT_HPP

#include <complex>
#include <vector>

namespace vspike {

// Thin wrapper over FFTW's real transforms.  Plans are cached per size behind a
// mutex; executions on caller-owned buffers are thread-safe.
class Rfft {
public:
    explicit Rfft(int n);

    int n() const { return n_; }
    int nmodes() const { return n_ / 2 + 1; }

    // forward: n reals -> n/2+1 complex coefficients of sum c_k e^{i k 2pi x/L}
    void forward(const double* in, std::complex<double>* out) const;
    // inverse including the 1/n normalization
    void inverse(const std::complex<double>* in, double* out) const;

private:
    int n_;
    void* plan_fwd_;
    void* plan_bwd_;
};

} // namespace vspike

#endif
