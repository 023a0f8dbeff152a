#include <chrono>
#include <cstdio>
#include <functional>

#include "nswn/fft.hpp"
#include "nswn/multipliers.hpp"
#include "nswn/renorm.hpp"

// timing comparison of the omp kernels against their serial reference twins
using namespace nswn;

namespace {

double time_ms(int reps, const std::function<void()>& fn)
{
    fn(); // warm up
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, double omp_ms, double serial_ms)
{
    std::printf("%-26s %10.3f ms %10.3f ms %8.2fx\n", name, omp_ms, serial_ms, serial_ms / omp_ms);
}

} // namespace

int main()
{
    std::printf("%-26s %13s %13s %9s\n", "kernel", "omp", "serial", "speedup");
    for (int N : {8, 16, 32}) {
        TorusLattice L(N);
        FftEngine eng(L);
        ScalarField f(L), g(L);
        for (long i = 0; i < L.n_modes(); ++i) {
            f.c[i] = cplx(std::sin(0.1 * i), std::cos(0.2 * i));
            g.c[i] = cplx(std::cos(0.3 * i), std::sin(0.4 * i));
        }
        enforce_reality(f);
        enforce_reality(g);
        std::printf("-- N = %d\n", N);

        auto heat = [](const std::array<int, 3>& k) { return std::exp(-0.01 * TorusLattice::norm2(k)); };
        row("multiplier",
            time_ms(20, [&] { apply_multiplier(f, heat); }),
            time_ms(20, [&] { apply_multiplier_serial(f, heat); }));

        ScalarField acc = f;
        row("axpy",
            time_ms(50, [&] { acc.axpy(0.5, g); }),
            time_ms(50, [&] {
                serial_for((long)acc.c.size(), [&](long i) { acc.c[i] += 0.5 * g.c[i]; });
            }));

        auto ga = eng.to_grid(f), gb = eng.to_grid(g);
        row("grid product",
            time_ms(10, [&] { eng.product_of_grids(ga, gb); }),
            time_ms(10, [&] {
                std::vector<cplx> prod(ga.size());
                serial_for((long)ga.size(), [&](long i) { prod[i] = ga[i] * gb[i]; });
                eng.to_modes(prod, true);
            }));

        double eps = 4.0 / N;
        row("counterterm c0",
            time_ms(5, [&] { counterterm_c0(L, eps); }),
            time_ms(5, [&] { counterterm_c0_naive(L, eps); }));
    }
    return 0;
}
