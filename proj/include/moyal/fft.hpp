#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace moyal::fft {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

enum class Direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

struct PlanKey {
  int outer, n, inner, dir;
  auto operator<=>(const PlanKey&) const = default;
};

// Plans are created once per layout and kept for the process lifetime.
inline fftw_plan cached_plan(const PlanKey& key) {
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const std::size_t total = static_cast<std::size_t>(key.outer) * key.n * key.inner;
  auto* buf = fftw_alloc_complex(total);
  fftw_iodim dims{key.n, key.inner, key.inner};
  fftw_iodim loops[2] = {{key.outer, key.n * key.inner, key.n * key.inner}, {key.inner, 1, 1}};
  fftw_plan plan = fftw_plan_guru_dft(1, &dims, 2, loops, buf, buf, key.dir, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  cache.emplace(key, plan);
  return plan;
}

}  // namespace detail

// Unnormalized in-place DFT along one axis of a row-major array.
inline void along_axis(std::complex<double>* data, const std::vector<int>& shape, int axis, Direction dir) {
  int outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= shape[a];
  for (int a = axis + 1; a < static_cast<int>(shape.size()); ++a) inner *= shape[a];
  const fftw_plan plan = detail::cached_plan({outer, shape[axis], inner, static_cast<int>(dir)});
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

inline void along_axis(std::vector<std::complex<double>>& data, const std::vector<int>& shape, int axis,
                       Direction dir) {
  along_axis(data.data(), shape, axis, dir);
}

// Signed integer frequency of DFT bin n for length m.
inline int signed_bin(int n, int m) { return n < (m + 1) / 2 ? n : n - m; }

}  // namespace moyal::fft
