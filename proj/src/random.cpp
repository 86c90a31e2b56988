#include "chernlab/random.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace chernlab {

Field random_trig_field(const ComplexGrid& grid, std::uint64_t seed, std::string_view stream,
                        int kmax, double amplitude, bool real, Weight weight) {
  const int axes = grid.real_axes();
  const int N = grid.resolution();
  const int width = 2 * kmax + 1;
  SplitMix64 rng(seed, stream);

  struct Mode {
    std::array<int, 4> k{};
    cplx c;
  };
  std::vector<Mode> modes;
  int total = 1;
  for (int a = 0; a < axes; ++a) total *= width;
  double norm = 0.0;
  for (int code = 0; code < total; ++code) {
    Mode m;
    int rest = code;
    for (int a = axes - 1; a >= 0; --a) {
      m.k[a] = rest % width - kmax;
      rest /= width;
    }
    double k2 = 0.0;
    bool positive = false, decided = false;
    for (int a = 0; a < axes; ++a) {
      k2 += m.k[a] * m.k[a];
      if (!decided && m.k[a] != 0) {
        positive = m.k[a] > 0;
        decided = true;
      }
    }
    if (!decided) continue;  // constant mode
    if (real && !positive) continue;
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    m.c = cplx(re, im);
    const double w = weight == Weight::value ? 1.0 : std::numbers::pi * std::numbers::pi * k2;
    norm += std::abs(m.c) * w * (real ? 2.0 : 1.0);
    modes.push_back(m);
  }
  const double scale = norm > 0 ? amplitude / norm : 0.0;

  // Synthesize on the grid with one inverse transform.
  if (2 * kmax >= N) throw std::invalid_argument("trigonometric field frequency exceeds grid Nyquist");
  const std::size_t size = grid.size();
  fftw_complex* buf = fftw_alloc_complex(size);
  auto* c = reinterpret_cast<cplx*>(buf);
  std::fill(c, c + size, cplx(0.0, 0.0));
  auto slot = [&](const std::array<int, 4>& k, int sign) {
    std::size_t idx = 0;
    for (int a = 0; a < axes; ++a) idx = idx * N + static_cast<std::size_t>(((sign * k[a]) % N + N) % N);
    return idx;
  };
  for (const auto& m : modes) {
    c[slot(m.k, 1)] += scale * m.c;
    if (real) c[slot(m.k, -1)] += scale * std::conj(m.c);
  }
  std::vector<int> dims(axes, N);
  fftw_plan plan = fftw_plan_dft(axes, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  Field out(grid, 1);
  auto dst = out.component(0);
  for (std::size_t p = 0; p < size; ++p) dst[p] = real ? cplx(c[p].real(), 0.0) : c[p];
  fftw_free(buf);
  return out;
}

}  // namespace chernlab
