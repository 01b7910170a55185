#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include "pcrf/bank.hpp"

namespace pcrf {

/// In-place iterative radix-2 transform. The size must be a power of two;
/// invert divides by the size so a round trip is the identity.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool invert) {
  const int n = static_cast<int>(a.size());
  PCRF_CHECK(n > 0 && (n & (n - 1)) == 0, "transform size must be a power of two");
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    double ang = (invert ? 2.0 : -2.0) * M_PI / len;
    std::complex<double> step(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int j = 0; j < len / 2; ++j) {
        auto u = a[i + j];
        auto v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= step;
      }
    }
  }
  if (invert)
    for (auto& x : a) x /= n;
}

/// Sliding products a[i] = sum_k b[i+k] lam[k] for i in [0, |b|-|lam|].
/// Empty result when lam is longer than b or either sequence is empty.
inline std::vector<double> correlate_direct(const std::vector<double>& b,
                                            const std::vector<double>& lam) {
  int nb = static_cast<int>(b.size()), p = static_cast<int>(lam.size());
  if (p == 0 || p > nb) return {};
  std::vector<double> out(nb - p + 1, 0.0);
  for (int i = 0; i + p <= nb; ++i)
    for (int k = 0; k < p; ++k) out[i] += b[i + k] * lam[k];
  return out;
}

/// Same values through a zero-padded transform: the correlation is the
/// convolution of b with lam reversed, so both real sequences ride one
/// complex transform (b in the real lane, reversed lam in the imaginary
/// lane) and conjugate symmetry splits their spectra back apart.
inline std::vector<double> correlate_fft(const std::vector<double>& b,
                                         const std::vector<double>& lam) {
  int nb = static_cast<int>(b.size()), p = static_cast<int>(lam.size());
  if (p == 0 || p > nb) return {};
  int m = nb + p - 1;
  int N = static_cast<int>(std::bit_ceil(static_cast<unsigned>(m)));
  std::vector<std::complex<double>> z(N);
  for (int i = 0; i < nb; ++i) z[i] += b[i];
  for (int k = 0; k < p; ++k) z[p - 1 - k] += std::complex<double>(0.0, lam[k]);
  fft_radix2(z, false);
  std::vector<std::complex<double>> c(N);
  for (int k = 0; k < N; ++k) {
    auto zk = z[k];
    auto zn = std::conj(z[(N - k) & (N - 1)]);
    auto bk = 0.5 * (zk + zn);
    auto rk = std::complex<double>(0.0, -0.5) * (zk - zn);
    c[k] = bk * rk;
  }
  fft_radix2(c, true);
  std::vector<double> out(nb - p + 1);
  for (int i = 0; i + p <= nb; ++i) out[i] = c[i + p - 1].real();
  return out;
}

/// Transform overhead dominates at small sizes, so short inputs take the
/// direct path; equivalence of the two paths is covered by tests.
inline std::vector<double> correlate(const std::vector<double>& b, const std::vector<double>& lam) {
  if (static_cast<int>(b.size()) < 64 || static_cast<int>(lam.size()) < 8)
    return correlate_direct(b, lam);
  return correlate_fft(b, lam);
}

/// 0/1 mask of the offsets at which beta occurs inside alpha, one slot per
/// alignment; empty when beta cannot fit.
inline std::vector<double> occurrence_mask(const Word& alpha, const Word& beta) {
  int la = static_cast<int>(alpha.size()), lb = static_cast<int>(beta.size());
  if (lb == 0 || lb > la) return {};
  std::vector<double> lam(la - lb + 1, 0.0);
  for (int k = 0; k + lb <= la; ++k)
    lam[k] = std::equal(beta.begin(), beta.end(), alpha.begin() + k) ? 1.0 : 0.0;
  return lam;
}

}  // namespace pcrf
