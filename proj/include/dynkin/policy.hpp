#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynkin {

/// A stopping policy: the set of states at which a player stops.
///
/// Stored as a packed bitset over a fixed universe of `universe()` states.
/// All binary set operations require both operands to share the same
/// universe size.
class StoppingPolicy {
 public:
  StoppingPolicy() = default;
  explicit StoppingPolicy(std::size_t universe)
      : universe_(universe), words_((universe + 63) / 64, 0) {}

  StoppingPolicy(std::size_t universe, std::initializer_list<std::size_t> members)
      : StoppingPolicy(universe) {
    for (auto m : members) insert(m);
  }

  static StoppingPolicy full(std::size_t universe) {
    StoppingPolicy p(universe);
    for (auto& w : p.words_) w = ~std::uint64_t{0};
    p.trim();
    return p;
  }

  /// Builds a policy from the low `universe` bits of `mask` (universe <= 64).
  static StoppingPolicy from_mask(std::size_t universe, std::uint64_t mask) {
    if (universe > 64) throw std::invalid_argument("from_mask: universe exceeds 64 states");
    StoppingPolicy p(universe);
    if (universe > 0) p.words_[0] = mask;
    p.trim();
    return p;
  }

  static StoppingPolicy from_indices(std::size_t universe, const std::vector<std::size_t>& idx) {
    StoppingPolicy p(universe);
    for (auto i : idx) p.insert(i);
    return p;
  }

  std::size_t universe() const { return universe_; }

  bool contains(std::size_t i) const {
    return i < universe_ && ((words_[i >> 6] >> (i & 63)) & 1u);
  }
  void insert(std::size_t i) {
    check_index(i);
    words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  void erase(std::size_t i) {
    check_index(i);
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
  }
  bool is_full() const { return count() == universe_; }

  std::uint64_t to_mask() const {
    if (universe_ > 64) throw std::logic_error("to_mask: universe exceeds 64 states");
    return words_.empty() ? 0 : words_[0];
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto bits = words_[w];
      while (bits) {
        out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return out;
  }

  StoppingPolicy complement() const {
    StoppingPolicy p = *this;
    for (auto& w : p.words_) w = ~w;
    p.trim();
    return p;
  }

  StoppingPolicy& operator|=(const StoppingPolicy& o) {
    same_universe(o);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
    return *this;
  }
  StoppingPolicy& operator&=(const StoppingPolicy& o) {
    same_universe(o);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
    return *this;
  }
  StoppingPolicy& operator-=(const StoppingPolicy& o) {
    same_universe(o);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~o.words_[w];
    return *this;
  }
  friend StoppingPolicy operator|(StoppingPolicy a, const StoppingPolicy& b) { return a |= b; }
  friend StoppingPolicy operator&(StoppingPolicy a, const StoppingPolicy& b) { return a &= b; }
  friend StoppingPolicy operator-(StoppingPolicy a, const StoppingPolicy& b) { return a -= b; }

  bool subset_of(const StoppingPolicy& o) const {
    same_universe(o);
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~o.words_[w]) return false;
    return true;
  }
  bool disjoint_from(const StoppingPolicy& o) const {
    same_universe(o);
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & o.words_[w]) return false;
    return true;
  }

  friend bool operator==(const StoppingPolicy&, const StoppingPolicy&) = default;

  /// Lexicographic order on the packed words, high word first; equals
  /// numeric bitmask order for universes of at most 64 states.
  friend bool operator<(const StoppingPolicy& a, const StoppingPolicy& b) {
    if (a.universe_ != b.universe_) return a.universe_ < b.universe_;
    for (std::size_t w = a.words_.size(); w-- > 0;)
      if (a.words_[w] != b.words_[w]) return a.words_[w] < b.words_[w];
    return false;
  }

  /// Hex rendering of the membership bits, most significant state first.
  std::string hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    const std::size_t nibbles = std::max<std::size_t>(1, (universe_ + 3) / 4);
    for (std::size_t k = nibbles; k-- > 0;) {
      unsigned v = 0;
      for (std::size_t b = 0; b < 4; ++b)
        if (contains(k * 4 + b)) v |= 1u << b;
      out.push_back(digits[v]);
    }
    return "0x" + out;
  }

  std::size_t hash() const {
    std::size_t h = std::hash<std::size_t>{}(universe_);
    for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= universe_) throw std::out_of_range("StoppingPolicy: state index out of range");
  }
  void same_universe(const StoppingPolicy& o) const {
    if (o.universe_ != universe_) throw std::invalid_argument("StoppingPolicy: universe mismatch");
  }
  void trim() {
    if (universe_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
  }

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct PolicyHash {
  std::size_t operator()(const StoppingPolicy& p) const { return p.hash(); }
};

}  // namespace dynkin
