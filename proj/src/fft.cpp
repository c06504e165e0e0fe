#include "bridgesim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bridgesim {

namespace {

std::mutex plan_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan> plan_cache;

fftw_plan get_plan(std::size_t n, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;
  std::vector<cplx> a(n), b(n);
  fftw_plan p = fftw_plan_dft_1d(
      static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
      reinterpret_cast<fftw_complex*>(b.data()), sign,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_cache.emplace(key, p);
  return p;
}

std::vector<cplx> run(const std::vector<cplx>& in, int sign) {
  check(!in.empty(), "fft: empty input");
  std::vector<cplx> out(in.size());
  fftw_plan p = get_plan(in.size(), sign);
  // out-of-place c2c with default flags leaves the input untouched
  fftw_execute_dft(p,
                   reinterpret_cast<fftw_complex*>(
                       const_cast<cplx*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<cplx> fft(const std::vector<cplx>& in) {
  return run(in, FFTW_FORWARD);
}

std::vector<cplx> ifft(const std::vector<cplx>& in) {
  std::vector<cplx> out = run(in, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= s;
  return out;
}

}  // namespace bridgesim
