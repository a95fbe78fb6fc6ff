#include "off/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace off::parallel {

namespace {
int default_threads()
{
#ifdef _OPENMP
    static const int n = omp_get_num_procs();
    return n;
#else
    return 1;
#endif
}
} // namespace

int max_threads() noexcept
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_max_threads(int n) noexcept
{
#ifdef _OPENMP
    omp_set_num_threads(n > 0 ? n : default_threads());
#else
    (void)n;
#endif
}

int threads_from_env() noexcept
{
    const char* raw = std::getenv("OFF_THREADS");
    if (raw == nullptr) {
        return 0;
    }
    char* end = nullptr;
    long v = std::strtol(raw, &end, 10);
    if (end == raw || *end != '\0' || v <= 0 || v > 4096) {
        return 0;
    }
    return static_cast<int>(v);
}

double pairwise_sum(std::span<const double> values) noexcept
{
    constexpr std::size_t leaf = 64;
    if (values.size() <= leaf) {
        double acc = 0.0;
        for (double v : values) {
            acc += v;
        }
        return acc;
    }
    std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace off::parallel
