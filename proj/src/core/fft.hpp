#pragma once

#include <complex>
#include <vector>

namespace mginf {

// In-place complex FFT. Power-of-two sizes run radix-2; anything else goes
// through Bluestein's chirp transform. `inverse` includes the 1/n factor.
void fft(std::vector<std::complex<double>>& a, bool inverse);

bool is_pow2(std::size_t n);
std::size_t next_pow2(std::size_t n);

}  // namespace mginf
