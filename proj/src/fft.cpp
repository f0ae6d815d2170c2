#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace microlocal::detail {
namespace {

// Planning is not thread-safe in FFTW; execution through the new-array
// interface is. Plans are created once and never destroyed.
class PlanCache {
public:
  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(dim, n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    int dims[3] = {n, n, n};
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n);
    auto* scratch = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(dim, dims, scratch, scratch,
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_inplace(std::complex<double>* data, int dim, int n, int sign) {
  fftw_plan plan = cache().get(dim, n, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace microlocal::detail
