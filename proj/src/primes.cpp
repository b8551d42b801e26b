#include "zf/primes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>

#include "zf/errors.hpp"
#include "zf/kahan.hpp"

namespace zf {

namespace {

constexpr std::size_t kSegment = std::size_t{1} << 20;
constexpr char kMagic[8] = {'Z', 'F', 'P', 'R', 'I', 'M', 'E', '2'};

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t floor_index(double x) {
  if (x <= 0) return 0;
  return static_cast<std::uint64_t>(std::floor(x));
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace

PrimeTable::PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes)
    : limit_(limit), primes_(std::move(primes)) {
  logs_.resize(primes_.size());
  for (std::size_t i = 0; i < primes_.size(); ++i) {
    logs_[i] = static_cast<double>(std::log(static_cast<long double>(primes_[i])));
  }
}

std::pair<std::size_t, std::size_t> PrimeTable::range(double lo, double hi) const {
  auto first = std::upper_bound(primes_.begin(), primes_.end(), floor_index(lo));
  auto last = std::upper_bound(primes_.begin(), primes_.end(), floor_index(hi));
  if (last < first) last = first;
  return {static_cast<std::size_t>(first - primes_.begin()),
          static_cast<std::size_t>(last - primes_.begin())};
}

void PrimeTable::require(double x) const {
  if (floor_index(x) > limit_) throw InsufficientSieveError(x, static_cast<double>(limit_));
}

PrimeTable sieve_primes(std::uint64_t limit) {
  if (limit < 2) throw DomainError("sieve_primes: limit must be at least 2");
  const std::uint64_t root = isqrt(limit);
  std::vector<std::uint64_t> base;
  {
    std::vector<char> small(root + 1, 1);
    for (std::uint64_t i = 2; i <= root; ++i) {
      if (!small[i]) continue;
      base.push_back(i);
      for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
    }
  }
  std::vector<std::uint64_t> primes;
  if (limit > 100) {
    const double est = static_cast<double>(limit) / (std::log(static_cast<double>(limit)) - 1.1);
    primes.reserve(static_cast<std::size_t>(est * 1.05));
  }
  std::vector<char> seg(kSegment);
  for (std::uint64_t lo = 2; lo <= limit; lo += kSegment) {
    const std::uint64_t hi = std::min<std::uint64_t>(limit, lo + kSegment - 1);
    const std::size_t len = hi - lo + 1;
    std::fill(seg.begin(), seg.begin() + len, 1);
    for (std::uint64_t p : base) {
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
      for (std::uint64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (seg[i]) primes.push_back(lo + i);
    }
  }
  return PrimeTable(limit, std::move(primes));
}

double prime_threshold(double T, double alpha) {
  if (!(alpha > 0)) throw DomainError("prime_threshold: alpha must be positive");
  // The double nearest e lies below e, so ln T is allowed a few ulps of slack.
  long double lt = std::log(static_cast<long double>(T));
  if (!(lt >= 1.0L - 1e-15L)) throw DomainError("prime_threshold: T must be at least e");
  lt = std::max(lt, 1.0L);
  const long double v = std::exp(std::pow(lt, static_cast<long double>(alpha)));
  const double d = static_cast<double>(v);
  if (!std::isfinite(d)) throw DomainError("prime_threshold: threshold overflows");
  return std::nextafter(d, std::numeric_limits<double>::infinity());
}

namespace {

template <typename Term>
double descending_sum(const PrimeTable& table, double P, double Q, Term term) {
  if (!(P >= 1.0) || !(Q >= P)) throw DomainError("prime sum: need 1 <= P <= Q");
  table.require(Q);
  auto [first, last] = table.range(P, Q);
  KahanSum<double> acc;
  for (std::size_t i = last; i-- > first;) acc += term(i);
  return acc.value();
}

}  // namespace

double mertens_sum(const PrimeTable& table, double P, double Q, int m) {
  if (m < 0) throw DomainError("mertens_sum: m must be nonnegative");
  const auto& pr = table.primes();
  const auto& lg = table.logs();
  return descending_sum(table, P, Q, [&](std::size_t i) {
    return std::pow(lg[i], m) / static_cast<double>(pr[i]);
  });
}

double cosine_prime_sum(const PrimeTable& table, double P, double Q, double eta) {
  const auto& pr = table.primes();
  const auto& lg = table.logs();
  return descending_sum(table, P, Q, [&](std::size_t i) {
    return std::cos(eta * lg[i]) / static_cast<double>(pr[i]);
  });
}

std::filesystem::path prime_cache_path(const std::filesystem::path& dir, std::uint64_t limit) {
  return dir / ("primes_" + std::to_string(limit) + ".bin");
}

void save_prime_cache(const PrimeTable& table, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open prime cache for writing: " + file.string());
  out.write(kMagic, sizeof kMagic);
  const std::uint64_t limit_le = to_little_endian(table.limit());
  out.write(reinterpret_cast<const char*>(&limit_le), sizeof limit_le);
  for (std::uint64_t p : table.primes()) {
    std::uint64_t le = to_little_endian(p);
    out.write(reinterpret_cast<const char*>(&le), sizeof le);
  }
  if (!out) throw std::runtime_error("failed writing prime cache: " + file.string());
}

std::optional<PrimeTable> load_prime_cache(const std::filesystem::path& file, std::uint64_t limit) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    return std::nullopt;
  }
  std::uint64_t le;
  if (!in.read(reinterpret_cast<char*>(&le), sizeof le) || to_little_endian(le) != limit) return std::nullopt;
  std::vector<std::uint64_t> primes;
  while (in.read(reinterpret_cast<char*>(&le), sizeof le)) primes.push_back(to_little_endian(le));
  if (in.gcount() != 0) return std::nullopt;
  if (!std::is_sorted(primes.begin(), primes.end()) ||
      (!primes.empty() && primes.back() > limit)) {
    return std::nullopt;
  }
  return PrimeTable(limit, std::move(primes));
}

PrimeTable cached_primes(std::uint64_t limit) {
  const char* dir = std::getenv("ZF_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return sieve_primes(limit);
  const auto file = prime_cache_path(dir, limit);
  if (auto hit = load_prime_cache(file, limit)) return std::move(*hit);
  PrimeTable table = sieve_primes(limit);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  try {
    save_prime_cache(table, file);
  } catch (const std::exception&) {
    // The cache is an optimisation; an unwritable directory is not fatal.
  }
  return table;
}

}  // namespace zf
