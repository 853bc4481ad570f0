#include "tpreg/ppml/separation.hpp"

#include <map>

namespace tpreg::ppml {

SeparationResult drop_separated(const Design& design) {
  const std::size_t n = design.rows();
  std::vector<char> active(n, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& keys : design.absorb) {
      std::map<int, double> totals;
      for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) totals[keys[i]] += design.y[i];
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (active[i] && totals[keys[i]] == 0.0) {
          active[i] = 0;
          changed = true;
        }
      }
    }
  }
  SeparationResult out;
  for (std::size_t i = 0; i < n; ++i) (active[i] ? out.kept : out.dropped).push_back(i);
  return out;
}

}  // namespace tpreg::ppml
