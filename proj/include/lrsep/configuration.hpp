#pragma once

// Occupation configurations on Lambda_N = {1, ..., N-1} with reservoir densities.
// Sites outside Lambda_N are never stored: formulas read alpha for z <= 0 and
// beta for z >= N.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrsep {

class Configuration {
 public:
  Configuration() = default;
  Configuration(int n, double alpha, double beta) : n_(n), alpha_(alpha), beta_(beta) {
    if (n < 2) throw std::invalid_argument("system size N must be >= 2");
    check_density(alpha, "alpha");
    check_density(beta, "beta");
    occ_.assign(static_cast<std::size_t>(n - 1), 0);
  }

  int size() const { return n_; }
  int sites() const { return n_ - 1; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  /// eta_z for z in Lambda_N.
  int operator[](int z) const { return occ_[static_cast<std::size_t>(z - 1)]; }
  void set(int z, int value) { occ_[static_cast<std::size_t>(z - 1)] = static_cast<std::uint8_t>(value != 0); }
  void flip(int z) { occ_[static_cast<std::size_t>(z - 1)] ^= 1U; }
  void swap(int x, int y) { std::swap(occ_[static_cast<std::size_t>(x - 1)], occ_[static_cast<std::size_t>(y - 1)]); }

  /// eta with the reservoir extension applied.
  double extended(int z) const {
    if (z <= 0) return alpha_;
    if (z >= n_) return beta_;
    return (*this)[z];
  }

  int particles() const {
    int k = 0;
    for (auto b : occ_) k += b;
    return k;
  }

  const std::vector<std::uint8_t>& occupation() const { return occ_; }

  /// Bit z-1 of the index is eta_z (valid for N <= 64).
  std::uint64_t to_index() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < occ_.size(); ++i) s |= static_cast<std::uint64_t>(occ_[i]) << i;
    return s;
  }
  static Configuration from_index(int n, double alpha, double beta, std::uint64_t s) {
    Configuration c(n, alpha, beta);
    for (std::size_t i = 0; i < c.occ_.size(); ++i) c.occ_[i] = static_cast<std::uint8_t>((s >> i) & 1U);
    return c;
  }

  /// Hex encoding of the occupation bitstring: each hex digit carries four
  /// consecutive sites, the first site in the most significant bit; the final
  /// digit is zero-padded.
  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < occ_.size(); i += 4) {
      unsigned v = 0;
      for (std::size_t j = 0; j < 4; ++j) {
        v <<= 1U;
        if (i + j < occ_.size()) v |= occ_[i + j];
      }
      out.push_back(digits[v]);
    }
    return out;
  }
  static Configuration from_hex(int n, double alpha, double beta, const std::string& hex) {
    Configuration c(n, alpha, beta);
    const std::size_t need = (c.occ_.size() + 3) / 4;
    if (hex.size() != need) throw std::invalid_argument("occupancy hex has wrong length for N");
    for (std::size_t d = 0; d < hex.size(); ++d) {
      const char ch = hex[d];
      unsigned v = 0;
      if (ch >= '0' && ch <= '9') {
        v = static_cast<unsigned>(ch - '0');
      } else if (ch >= 'a' && ch <= 'f') {
        v = static_cast<unsigned>(ch - 'a' + 10);
      } else if (ch >= 'A' && ch <= 'F') {
        v = static_cast<unsigned>(ch - 'A' + 10);
      } else {
        throw std::invalid_argument("occupancy hex has a non-hex character");
      }
      for (std::size_t j = 0; j < 4; ++j) {
        const std::size_t i = 4 * d + j;
        const auto bit = static_cast<std::uint8_t>((v >> (3 - j)) & 1U);
        if (i < c.occ_.size()) {
          c.occ_[i] = bit;
        } else if (bit != 0) {
          throw std::invalid_argument("occupancy hex has nonzero padding bits");
        }
      }
    }
    return c;
  }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.n_ == b.n_ && a.alpha_ == b.alpha_ && a.beta_ == b.beta_ && a.occ_ == b.occ_;
  }

 private:
  static void check_density(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(std::string("reservoir density ") + name + " must lie in [0,1]");
    }
  }

  int n_ = 0;
  double alpha_ = 0.5;
  double beta_ = 0.5;
  std::vector<std::uint8_t> occ_;
};

/// Independent Bernoulli occupations; density(z) gives the occupation
/// probability of site z and rng.uniform() draws from [0,1).
template <class Density, class Rng>
Configuration random_configuration(int n, double alpha, double beta, Density&& density, Rng& rng) {
  Configuration c(n, alpha, beta);
  for (int z = 1; z <= n - 1; ++z) c.set(z, rng.uniform() < density(z) ? 1 : 0);
  return c;
}

}  // namespace lrsep
