#ifndef ECHOVERIFY_NODE_SET_HPP
#define ECHOVERIFY_NODE_SET_HPP

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>

namespace echoverify {

/// Dense node identifier, 0..node_count-1.
using NodeId = int;

/// Upper bound on network size; every node set fits in one byte.
inline constexpr int kMaxNodes = 8;

/// Fixed-width set of node identifiers backed by a bit mask.
class NodeSet {
 public:
  using Bits = std::uint8_t;

  constexpr NodeSet() = default;
  constexpr NodeSet(std::initializer_list<NodeId> nodes) {
    for (NodeId n : nodes) insert(n);
  }

  static constexpr NodeSet from_bits(unsigned bits) {
    NodeSet s;
    s.bits_ = static_cast<Bits>(bits);
    return s;
  }
  /// {0, 1, ..., count-1}
  static constexpr NodeSet first_n(int count) {
    return from_bits(count >= kMaxNodes ? 0xFFu : ((1u << count) - 1u));
  }

  constexpr Bits bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool contains(NodeId n) const {
    return n >= 0 && n < kMaxNodes && ((bits_ >> n) & 1u) != 0;
  }

  constexpr void insert(NodeId n) { bits_ = static_cast<Bits>(bits_ | (1u << n)); }
  constexpr void erase(NodeId n) { bits_ = static_cast<Bits>(bits_ & ~(1u << n)); }

  constexpr NodeSet with(NodeId n) const {
    NodeSet s = *this;
    s.insert(n);
    return s;
  }
  constexpr NodeSet without(NodeId n) const {
    NodeSet s = *this;
    s.erase(n);
    return s;
  }
  constexpr bool is_subset_of(NodeSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }

  friend constexpr NodeSet operator|(NodeSet a, NodeSet b) {
    return from_bits(a.bits_ | b.bits_);
  }
  friend constexpr NodeSet operator&(NodeSet a, NodeSet b) {
    return from_bits(a.bits_ & b.bits_);
  }
  friend constexpr NodeSet operator-(NodeSet a, NodeSet b) {
    return from_bits(a.bits_ & ~b.bits_);
  }
  constexpr NodeSet& operator|=(NodeSet o) { return *this = *this | o; }
  constexpr NodeSet& operator&=(NodeSet o) { return *this = *this & o; }
  constexpr NodeSet& operator-=(NodeSet o) { return *this = *this - o; }

  friend constexpr bool operator==(NodeSet, NodeSet) = default;
  friend constexpr auto operator<=>(NodeSet, NodeSet) = default;

  /// Iterates members in ascending order.
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = NodeId;
    using difference_type = std::ptrdiff_t;
    using pointer = const NodeId*;
    using reference = NodeId;

    constexpr iterator() = default;
    constexpr explicit iterator(unsigned rest) : rest_(rest) {}
    constexpr NodeId operator*() const { return std::countr_zero(rest_); }
    constexpr iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    friend constexpr bool operator==(iterator, iterator) = default;

   private:
    unsigned rest_ = 0;
  };

  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

 private:
  Bits bits_ = 0;
};

}  // namespace echoverify

#endif  // ECHOVERIFY_NODE_SET_HPP
