#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace zf {

// Primes up to an inclusive limit together with their natural logarithms.
// Immutable after construction.
class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes);

  std::uint64_t limit() const { return limit_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }
  const std::vector<double>& logs() const { return logs_; }
  std::size_t size() const { return primes_.size(); }

  // Index range [first, last) of primes p with lo < p <= hi.
  std::pair<std::size_t, std::size_t> range(double lo, double hi) const;

  // Throws InsufficientSieveError when x exceeds the limit.
  void require(double x) const;

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> primes_;
  std::vector<double> logs_;
};

// Segmented sieve of Eratosthenes, 2^20-entry segments.
PrimeTable sieve_primes(std::uint64_t limit);

// exp((ln T)^alpha) evaluated in extended precision and rounded up by one ulp.
double prime_threshold(double T, double alpha);

// Sum over P < p <= Q of (ln p)^m / p, compensated, in descending prime order.
double mertens_sum(const PrimeTable& table, double P, double Q, int m);

// Sum over P < p <= Q of cos(eta ln p) / p, compensated, descending order.
double cosine_prime_sum(const PrimeTable& table, double P, double Q, double eta);

inline constexpr double kMertensConstant = 0.2614972128476428;

// Binary cache: 8-byte magic "ZFPRIME2", the sieve limit, then the primes,
// all little-endian uint64. A file for a different limit is a miss.
std::filesystem::path prime_cache_path(const std::filesystem::path& dir, std::uint64_t limit);
void save_prime_cache(const PrimeTable& table, const std::filesystem::path& file);
std::optional<PrimeTable> load_prime_cache(const std::filesystem::path& file, std::uint64_t limit);

// Sieve through the cache directory named by ZF_CACHE_DIR when it is set.
PrimeTable cached_primes(std::uint64_t limit);

}  // namespace zf
