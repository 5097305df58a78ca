#pragma once

#include "divcorr/exact.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace divcorr {

/// Bytes of table storage per integer in [0, n_max]:
/// spf (4) + mu (1) + phi (4) + lambda (8) + num_div (2) + psi_prefix (8).
inline constexpr std::size_t kTableBytesPerEntry = 27;

struct TableOptions {
    /// Upper limit on table storage; build_tables refuses anything larger.
    std::size_t memory_budget_bytes = std::size_t{3} << 30;
};

/// Immutable sieved arithmetic functions on [1, n_max]. Index 0 is a
/// placeholder (zero) so that every array is indexed by n directly.
class ArithTables {
public:
    std::uint64_t n_max() const noexcept { return n_max_; }

    std::uint32_t spf(std::uint64_t n) const { return spf_.at(n); }
    int mu(std::uint64_t n) const { return mu_.at(n); }
    std::uint32_t phi(std::uint64_t n) const { return phi_.at(n); }
    double lambda(std::uint64_t n) const { return lambda_.at(n); }
    unsigned num_div(std::uint64_t n) const { return num_div_.at(n); }
    /// ψ(x) = Σ_{n≤x} Λ(n) for 0 <= x <= n_max; compensated accumulation.
    double psi(std::int64_t x) const;

    std::span<const std::int8_t> mu_values() const noexcept { return mu_; }
    std::span<const std::uint32_t> phi_values() const noexcept { return phi_; }
    std::span<const double> lambda_values() const noexcept { return lambda_; }
    std::span<const double> psi_prefix() const noexcept { return psi_prefix_; }
    const std::vector<std::uint32_t> &primes() const noexcept { return primes_; }

    /// Exact von Mangoldt data: (p, e) when n = p^e, nothing otherwise.
    std::optional<PrimePower> prime_power(std::uint64_t n) const;
    /// Factorization of n <= n_max through the smallest-prime-factor table.
    std::vector<PrimePower> factor(std::uint64_t n) const;
    /// Distinct primes of n <= n_max.
    std::vector<std::uint32_t> distinct_primes(std::uint64_t n) const;
    /// Sum of divisors, computed on demand from spf.
    std::uint64_t sigma(std::uint64_t n) const;

    friend ArithTables build_tables(std::uint64_t n_max, const TableOptions &options);
    friend void save_tables(const ArithTables &tables, const std::filesystem::path &path);
    friend ArithTables load_tables(const std::filesystem::path &path);

private:
    std::uint64_t n_max_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<std::int8_t> mu_;
    std::vector<std::uint32_t> phi_;
    std::vector<double> lambda_;
    std::vector<std::uint16_t> num_div_;
    std::vector<double> psi_prefix_;
    std::vector<std::uint32_t> primes_;

    void finish_derived();
};

/// Linear (Euler) sieve for spf, μ, φ, d(n); Λ and ψ follow in one pass.
ArithTables build_tables(std::uint64_t n_max, const TableOptions &options = {});

/// Binary cache: "DCTB" magic, u32 version, u64 n_max, then little-endian
/// arrays spf, mu, phi, num_div. Λ and ψ are rebuilt on load.
inline constexpr std::uint32_t kTableCacheVersion = 1;
void save_tables(const ArithTables &tables, const std::filesystem::path &path);
ArithTables load_tables(const std::filesystem::path &path);

/// Loads tables_v<version>_<n_max>.bin from $DIVCORR_CACHE_DIR when present,
/// builds and stores it otherwise. Without the variable it just builds.
ArithTables cached_tables(std::uint64_t n_max, const TableOptions &options = {});

/// φ₂: multiplicative, φ₂(p) = p − 2 on primes; squarefree arguments only.
std::int64_t phi2(std::int64_t n);

struct SquarefreeKernel {
    std::uint64_t value = 1; // j*
    std::int64_t source = 1; // j
};

/// Largest squarefree divisor of |j|.
SquarefreeKernel squarefree_kernel(std::int64_t j);

/// ψ(x; q, a) = Σ_{n≤x, n≡a (mod q)} Λ(n).
double psi_ap(std::int64_t x, std::uint64_t q, std::int64_t a, const ArithTables &tables);
/// E(x; q, a) = ψ(x; q, a) − [gcd(a, q) = 1]·x/φ(q).
double error_in_ap(std::int64_t x, std::uint64_t q, std::int64_t a, const ArithTables &tables);
/// Σ_{1≤q≤Q} max_{(a,q)=1} |E(x; q, a)|.
double bv_sum(std::int64_t x, std::uint64_t Q, const ArithTables &tables);

} // namespace divcorr
