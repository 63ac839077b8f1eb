// Benchmark: OpenMP batch propagation against the serial reference.
// Usage: bench_batch [n_jobs] [t_end_ns]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "excsim/dynamics.hpp"
#include "excsim/photonics.hpp"

using namespace excsim;
using clk = std::chrono::steady_clock;

int main(int argc, char** argv) {
    const int n_jobs = argc > 1 ? std::atoi(argv[1]) : 32;
    const double t_end = argc > 2 ? std::atof(argv[2]) : 12.0;

    const DeviceParams dev{};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::vector<PropagationJob> jobs;
    for (int i = 0; i < n_jobs; ++i) {
        PropagationJob j;
        j.rho0 = encode_exciton(QubitState::from_angles(u(rng) * M_PI, u(rng) * 2.0 * M_PI));
        j.pulse.baseline_field = -175.0 + 10.0 * u(rng);
        j.pulse.pulses.push_back({-15.0 - 5.0 * u(rng), 0.5, 0.389});
        j.noise = build_noise(dev);
        jobs.push_back(j);
    }
    const auto tg = bin_centers(t_end, 0.025);

    const auto t0 = clk::now();
    const auto serial = propagate_batch_serial(jobs, dev, tg);
    const auto t1 = clk::now();
    const auto parallel = propagate_batch(jobs, dev, tg);
    const auto t2 = clk::now();

    double max_dev = 0.0;
    for (int j = 0; j < n_jobs; ++j)
        for (std::size_t k = 0; k < tg.size(); ++k)
            max_dev = std::max(max_dev, (serial[j].rho[k] - parallel[j].rho[k]).norm());

    const double ts = std::chrono::duration<double>(t1 - t0).count();
    const double tp = std::chrono::duration<double>(t2 - t1).count();
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("jobs: %d, window: %.1f ns, step 1 ps\n", n_jobs, t_end);
    std::printf("serial reference: %8.3f s\n", ts);
    std::printf("openmp (%2d thr):  %8.3f s  (speedup %.2fx)\n", threads, tp, ts / tp);
    std::printf("max |serial - parallel| deviation: %.3g\n", max_dev);
    return max_dev == 0.0 ? 0 : 1;
}
