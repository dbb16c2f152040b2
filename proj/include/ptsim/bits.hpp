#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ptsim {

/// Finite {0,1}-string. Position 0 is the leftmost character of the
/// canonical text form. Reads past the end yield 0, so a Bits value also
/// stands for the finite set of its 1-positions inside a zero tail.
class Bits {
public:
  Bits() = default;
  explicit Bits(std::vector<bool> bits) : bits_(std::move(bits)) {}

  static Bits from_text(std::string_view text);
  static Bits zeros(std::size_t n) { return Bits(std::vector<bool>(n, false)); }
  static Bits ones(std::size_t n) { return Bits(std::vector<bool>(n, true)); }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  bool at(std::size_t i) const;
  /// Zero beyond the end.
  bool get(std::size_t i) const { return i < bits_.size() && bits_[i]; }
  void set(std::size_t i, bool v);
  void push_back(bool v) { bits_.push_back(v); }

  Bits prefix(std::size_t n) const;
  std::size_t count() const;
  std::vector<std::size_t> ones_positions() const;
  std::string text() const;

  friend bool operator==(const Bits& a, const Bits& b) { return a.bits_ == b.bits_; }
  friend std::strong_ordering operator<=>(const Bits& a, const Bits& b);

private:
  std::vector<bool> bits_;
};

/// sigma is an initial segment of rho.
bool is_prefix(const Bits& sigma, const Bits& rho);

/// X/sigma: replace the first |sigma| bits of x. Requires |sigma| <= |x|.
Bits overwrite(const Bits& x, const Bits& sigma);

/// Set-style inclusion: every 1 of sigma is a 1 of rho (positions past
/// |rho| count as 0).
bool subset_leq(const Bits& sigma, const Bits& rho);

/// sigma^S: keep the 1s of sigma that are also in mask. Requires
/// |mask| >= |sigma|.
Bits restrict_to(const Bits& sigma, const Bits& mask);

Bits complement_of(const Bits& s);
Bits set_union(const Bits& a, const Bits& b);
Bits set_intersection(const Bits& a, const Bits& b);

/// Position-major coding of an ordered k-partition: bit k*x+j of the
/// result is parts[j](x). All parts must have equal length.
Bits interleave(const std::vector<Bits>& parts);

/// Inverse of interleave. Requires |code| to be a multiple of k, k >= 1.
std::vector<Bits> deinterleave(const Bits& code, std::size_t k);

/// The finitized ground sets of the construction: a universe of size N,
/// the set A to be split, and the oracle stand-in C.
struct GroundSets {
  std::size_t universe = 0;
  Bits a;
  Bits c;

  Bits a_bar() const { return complement_of(a); }
  void check() const;  // throws if lengths disagree with universe
};

}  // namespace ptsim
