#include "ptsim/bits.hpp"

#include <algorithm>
#include <stdexcept>

namespace ptsim {

Bits Bits::from_text(std::string_view text) {
  std::vector<bool> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch == '0') {
      bits.push_back(false);
    } else if (ch == '1') {
      bits.push_back(true);
    } else {
      throw std::invalid_argument("Bits::from_text: character is not '0' or '1'");
    }
  }
  return Bits(std::move(bits));
}

bool Bits::at(std::size_t i) const {
  if (i >= bits_.size()) throw std::out_of_range("Bits::at: index past end");
  return bits_[i];
}

void Bits::set(std::size_t i, bool v) {
  if (i >= bits_.size()) throw std::out_of_range("Bits::set: index past end");
  bits_[i] = v;
}

Bits Bits::prefix(std::size_t n) const {
  if (n > bits_.size()) throw std::out_of_range("Bits::prefix: length past end");
  return Bits(std::vector<bool>(bits_.begin(), bits_.begin() + static_cast<long>(n)));
}

std::size_t Bits::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

std::vector<std::size_t> Bits::ones_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

std::string Bits::text() const {
  std::string out;
  out.reserve(bits_.size());
  for (bool b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

std::strong_ordering operator<=>(const Bits& a, const Bits& b) {
  std::size_t n = std::min(a.bits_.size(), b.bits_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.bits_[i] != b.bits_[i]) return a.bits_[i] ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return a.bits_.size() <=> b.bits_.size();
}

bool is_prefix(const Bits& sigma, const Bits& rho) {
  if (sigma.size() > rho.size()) return false;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma.at(i) != rho.at(i)) return false;
  return true;
}

Bits overwrite(const Bits& x, const Bits& sigma) {
  if (sigma.size() > x.size()) throw std::invalid_argument("overwrite: |sigma| > |X|");
  Bits out = x;
  for (std::size_t i = 0; i < sigma.size(); ++i) out.set(i, sigma.at(i));
  return out;
}

bool subset_leq(const Bits& sigma, const Bits& rho) {
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma.at(i) && !rho.get(i)) return false;
  return true;
}

Bits restrict_to(const Bits& sigma, const Bits& mask) {
  if (mask.size() < sigma.size()) throw std::invalid_argument("restrict_to: mask shorter than string");
  Bits out = sigma;
  for (std::size_t i = 0; i < sigma.size(); ++i) out.set(i, sigma.at(i) && mask.at(i));
  return out;
}

Bits complement_of(const Bits& s) {
  Bits out = s;
  for (std::size_t i = 0; i < s.size(); ++i) out.set(i, !s.at(i));
  return out;
}

Bits set_union(const Bits& a, const Bits& b) {
  Bits out = Bits::zeros(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out.set(i, a.get(i) || b.get(i));
  return out;
}

Bits set_intersection(const Bits& a, const Bits& b) {
  Bits out = Bits::zeros(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out.set(i, a.get(i) && b.get(i));
  return out;
}

Bits interleave(const std::vector<Bits>& parts) {
  if (parts.empty()) throw std::invalid_argument("interleave: no parts");
  std::size_t k = parts.size();
  std::size_t len = parts[0].size();
  for (const Bits& p : parts)
    if (p.size() != len) throw std::invalid_argument("interleave: unequal part lengths");
  Bits out = Bits::zeros(k * len);
  for (std::size_t x = 0; x < len; ++x)
    for (std::size_t j = 0; j < k; ++j) out.set(k * x + j, parts[j].at(x));
  return out;
}

std::vector<Bits> deinterleave(const Bits& code, std::size_t k) {
  if (k == 0) throw std::invalid_argument("deinterleave: k = 0");
  if (code.size() % k != 0) throw std::invalid_argument("deinterleave: length not a multiple of k");
  std::size_t len = code.size() / k;
  std::vector<Bits> parts(k, Bits::zeros(len));
  for (std::size_t x = 0; x < len; ++x)
    for (std::size_t j = 0; j < k; ++j) parts[j].set(x, code.at(k * x + j));
  return parts;
}

void GroundSets::check() const {
  if (a.size() != universe || c.size() != universe)
    throw std::invalid_argument("GroundSets: A and C must have length exactly N");
}

}  // namespace ptsim
