#include "narrative/varset.hpp"

#include <stdexcept>

namespace narrative {

VarSet::VarSet(std::initializer_list<int> vars) {
  for (int v : vars) {
    if (v < 1 || v > kMaxVariables)
      throw std::domain_error("variable index out of range: " + std::to_string(v));
    mask_ |= 1u << (v - 1);
  }
}

VarSet VarSet::from_vector(const std::vector<int>& vars) {
  VarSet s;
  for (int v : vars) {
    if (v < 1 || v > kMaxVariables)
      throw std::domain_error("variable index out of range: " + std::to_string(v));
    s = s.with(v);
  }
  return s;
}

std::vector<int> VarSet::to_vector() const {
  std::vector<int> out;
  for (std::uint32_t m = mask_; m != 0; m &= m - 1)
    out.push_back(std::countr_zero(m) + 1);
  return out;
}

std::string VarSet::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int v : to_vector()) {
    if (!first) s += ",";
    s += std::to_string(v);
    first = false;
  }
  return s + "}";
}

void Projector::not_contained(VarSet super, VarSet sub) {
  throw std::domain_error("projection target " + sub.to_string() + " is not contained in " +
                          super.to_string());
}

int position_of(VarSet vars, int var) {
  if (!vars.contains(var)) throw std::domain_error("variable not in set");
  return std::popcount(vars.mask() & ((1u << (var - 1)) - 1u));
}

int value_of(VarSet vars, std::uint32_t index, int var) {
  return static_cast<int>((index >> position_of(vars, var)) & 1u);
}

}  // namespace narrative
