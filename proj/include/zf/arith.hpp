#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace zf {

// Deterministic Miller-Rabin for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

// Prime factorisation by trial division: (p, multiplicity) ascending.
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);

}  // namespace zf
