// Serial reference vs OpenMP timings for the data-parallel hot loops.
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "rmtlab/dbm.hpp"
#include "rmtlab/dpp.hpp"
#include "rmtlab/harness.hpp"
#include "rmtlab/kernels.hpp"

namespace {

double seconds(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Returns false when the two paths disagree bitwise.
bool report(const char* name, const std::function<std::vector<double>(rmtlab::Execution)>& f) {
  std::vector<double> a, b;
  const double serial = seconds([&] { a = f(rmtlab::Execution::kSerial); });
  const double parallel = seconds([&] { b = f(rmtlab::Execution::kOpenMP); });
  std::printf("%-28s serial %8.3f s   openmp %8.3f s   speedup %5.2fx   %s\n", name, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0, a == b ? "identical" : "MISMATCH");
  return a == b;
}

}  // namespace

int main() {
  std::printf("workers: %d\n", rmtlab::worker_count());
  const rmtlab::EnsembleConfig gue;

  bool same = report("spectra N=200 M=400", [&](rmtlab::Execution exec) {
    std::vector<double> lowest(400);
    rmtlab::for_each_sample(gue, 200, 400, 1, 0, [&](std::size_t i, const rmtlab::Spectrum& s) {
      lowest[i] = s[0];
    }, exec);
    return lowest;
  });

  same &= report("dbm paths N=50 x64", [&](rmtlab::Execution exec) {
    std::vector<double> last(64);
    rmtlab::for_each_index(64, [&](std::size_t p) {
      auto rng = rmtlab::make_engine(2, p);
      const auto ev = rmtlab::eigenvalues(rmtlab::sample_gue(50, rng));
      rmtlab::DbmState st{ev, 0.0};
      st = rmtlab::dbm_evolve(st, 0.1, 1e-3, rng);
      last[p] = st.spec[0];
    }, exec);
    return last;
  });

  // The tensorized factorial moment parallelizes internally over its lead
  // index; compare one thread against all workers.
  const auto K = rmtlab::Kernel::gue(100);
  const rmtlab::Interval iv{-0.05, 0.05};
  const int workers = rmtlab::worker_count();
  same &= report("factorial moment k=4 q=12", [&](rmtlab::Execution exec) {
    rmtlab::set_worker_count(exec == rmtlab::Execution::kSerial ? 1 : workers);
    return std::vector<double>{rmtlab::factorial_moment(K, iv, 4, 12)};
  });
  rmtlab::set_worker_count(workers);
  return same ? 0 : 1;
}
