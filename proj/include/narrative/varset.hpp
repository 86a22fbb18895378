#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace narrative {

/// Hard cap on the number of binary variables in a model.
inline constexpr int kMaxVariables = 12;

/// A set of variable indices in 1..kMaxVariables, stored as a bitmask where
/// variable i occupies bit i-1. Iteration is always in ascending index order,
/// which is also the bit order used by every table indexed over the set.
class VarSet {
 public:
  constexpr VarSet() = default;
  constexpr explicit VarSet(std::uint32_t mask) : mask_(mask) {}
  VarSet(std::initializer_list<int> vars);

  static VarSet from_vector(const std::vector<int>& vars);
  static constexpr VarSet range(int first, int last) {
    std::uint32_t m = 0;
    for (int i = first; i <= last; ++i) m |= 1u << (i - 1);
    return VarSet(m);
  }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(int var) const {
    return var >= 1 && var <= 32 && ((mask_ >> (var - 1)) & 1u) != 0;
  }
  constexpr bool subset_of(VarSet other) const {
    return (mask_ & ~other.mask_) == 0;
  }
  constexpr bool disjoint(VarSet other) const {
    return (mask_ & other.mask_) == 0;
  }
  constexpr int max_var() const { return 32 - std::countl_zero(mask_); }

  constexpr VarSet operator|(VarSet o) const { return VarSet(mask_ | o.mask_); }
  constexpr VarSet operator&(VarSet o) const { return VarSet(mask_ & o.mask_); }
  constexpr VarSet operator-(VarSet o) const { return VarSet(mask_ & ~o.mask_); }
  constexpr bool operator==(const VarSet&) const = default;
  constexpr auto operator<=>(const VarSet&) const = default;

  VarSet with(int var) const { return VarSet(mask_ | (1u << (var - 1))); }
  VarSet without(int var) const { return VarSet(mask_ & ~(1u << (var - 1))); }

  std::vector<int> to_vector() const;
  std::string to_string() const;

 private:
  std::uint32_t mask_ = 0;
};

/// Maps an assignment over a superset (bit positions given by `super`) onto
/// the compact index of its restriction to `sub`. Both sets use ascending
/// variable order, lowest variable in the least significant bit.
class Projector {
 public:
  Projector(VarSet super, VarSet sub) {
    if (!sub.subset_of(super)) not_contained(super, sub);
    int pos = 0;
    std::uint32_t below = 0;
    for (std::uint32_t m = super.mask(); m != 0; m &= m - 1, ++pos) {
      std::uint32_t weight = 0;
      if (sub.mask() & (m & (~m + 1u))) {
        weight = 1u << count_;
        positions_[count_++] = static_cast<std::uint8_t>(pos);
      }
      // u -> u + 1 sets bit pos and clears the bits below it.
      steps_[pos] = weight - below;
      below += weight;
    }
  }
  std::uint32_t operator()(std::uint32_t super_index) const {
    std::uint32_t out = 0;
    for (int k = 0; k < count_; ++k) out |= ((super_index >> positions_[k]) & 1u) << k;
    return out;
  }
  /// Calls f(u, projection) for every super index u below `size`, ascending.
  template <class F>
  void visit(std::uint32_t size, F&& f) const {
    std::uint32_t proj = 0;
    if (size % 4 != 0) {
      f(std::uint32_t{0}, proj);
      for (std::uint32_t u = 1; u < size; ++u) {
        proj += steps_[std::countr_zero(u)];
        f(u, proj);
      }
      return;
    }
    // Offsets within an aligned block of four are the same for every block.
    const std::uint32_t o1 = steps_[0], o2 = o1 + steps_[1], o3 = o2 + steps_[0];
    for (std::uint32_t u = 0;;) {
      f(u, proj);
      f(u + 1, proj + o1);
      f(u + 2, proj + o2);
      f(u + 3, proj + o3);
      u += 4;
      if (u >= size) break;
      proj += o3 + steps_[std::countr_zero(u)];
    }
  }

 private:
  [[noreturn]] static void not_contained(VarSet super, VarSet sub);
  std::array<std::uint8_t, kMaxVariables> positions_{};
  std::array<std::uint32_t, kMaxVariables> steps_{};
  int count_ = 0;
};

/// Calls f(var) for each member in ascending order.
template <class F>
void for_each_var(VarSet s, F&& f) {
  for (std::uint32_t m = s.mask(); m != 0; m &= m - 1) f(std::countr_zero(m) + 1);
}

/// Bit position of `var` inside a compact assignment over `vars`.
int position_of(VarSet vars, int var);

/// Value of variable `var` inside a compact assignment over `vars`.
int value_of(VarSet vars, std::uint32_t index, int var);

}  // namespace narrative
