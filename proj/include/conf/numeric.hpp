#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace conf {

using cplx = std::complex<double>;

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Fixed-order pairwise (cascade) summation. Bit-reproducible for a given
/// input order, and far better conditioned than naive accumulation for the
/// large quadrature sums used throughout.
double pairwise_sum(std::span<const double> values);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre polynomial.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussLegendre(std::size_t n);
};

/// In-place radix-2 FFT, data.size() must be a power of two.
/// Computes X_k = sum_j x_j exp(-2*pi*i*j*k/N).
void fft_radix2(std::vector<cplx>& data);

std::size_t next_pow2(std::size_t n);

/// Runs body(i) for i in [0, count) split across workers in contiguous
/// blocks. Worker count comes from CONF_WORKERS (default: hardware
/// concurrency). Each index writes only its own slot of any output array,
/// so results are identical for any worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace conf
