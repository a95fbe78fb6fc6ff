#ifndef OFF_PARALLEL_HPP
#define OFF_PARALLEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>

namespace off::parallel {

// Rows per reduction block. Fixed so that block boundaries, and therefore the
// floating point summation order, never depend on the thread count.
inline constexpr std::ptrdiff_t kBlockRows = 2048;

int max_threads() noexcept;

// Caps OpenMP parallelism for the calling process. n <= 0 restores the default.
void set_max_threads(int n) noexcept;

// Reads OFF_THREADS; returns 0 when unset or malformed.
int threads_from_env() noexcept;

inline std::ptrdiff_t block_count(std::ptrdiff_t rows) noexcept
{
    return rows <= 0 ? 0 : (rows + kBlockRows - 1) / kBlockRows;
}

// Pairwise (cascade) summation; order is a function of the length only.
double pairwise_sum(std::span<const double> values) noexcept;

// splitmix64 step, used to derive independent per-block / per-seed streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

} // namespace off::parallel

#endif // OFF_PARALLEL_HPP
