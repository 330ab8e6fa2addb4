#include "bolab/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace bolab::fft {

namespace {

// Plans are cached per (size, direction) and created with FFTW_ESTIMATE so
// that the executed algorithm is deterministic run to run. FFTW_UNALIGNED
// lets us execute the cached plan on arbitrary caller buffers.
class PlanCache {
 public:
  void execute(std::vector<std::complex<double>>& data, int sign) {
    const int n = static_cast<int>(data.size());
    fftw_plan plan = nullptr;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto& slot = plans_[key(n, sign)];
      if (slot == nullptr) {
        std::vector<std::complex<double>> scratch(n);
        slot = fftw_plan_dft_1d(
            n, reinterpret_cast<fftw_complex*>(scratch.data()),
            reinterpret_cast<fftw_complex*>(scratch.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (slot == nullptr) throw std::runtime_error("fftw plan creation failed");
      }
      plan = slot;
    }
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
  }

 private:
  static long long key(int n, int sign) { return (static_cast<long long>(n) << 2) | (sign > 0 ? 1 : 0); }
  std::mutex mutex_;
  std::unordered_map<long long, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

int good_size(int n) {
  if (n < 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    while (r % 2 == 0) r /= 2;
    while (r % 3 == 0) r /= 3;
    while (r % 5 == 0) r /= 5;
    if (r == 1) return m;
  }
}

void forward(std::vector<std::complex<double>>& data) {
  if (data.empty()) return;
  cache().execute(data, FFTW_FORWARD);
}

void backward(std::vector<std::complex<double>>& data) {
  if (data.empty()) return;
  cache().execute(data, FFTW_BACKWARD);
}

}  // namespace bolab::fft
