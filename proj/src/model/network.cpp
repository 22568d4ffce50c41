#include "umpclear/model/network.hpp"

namespace umpclear {

std::vector<int> isolated_buses(const std::vector<Line>& lines, int num_buses, int from) {
  std::vector<std::vector<int>> adj(num_buses);
  for (const auto& l : lines) {
    if (l.from_bus < 0 || l.from_bus >= num_buses || l.to_bus < 0 || l.to_bus >= num_buses)
      throw NetworkError("line " + l.id + ": bus out of range");
    adj[l.from_bus].push_back(l.to_bus);
    adj[l.to_bus].push_back(l.from_bus);
  }
  std::vector<char> seen(num_buses, 0);
  std::vector<int> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const int b = stack.back();
    stack.pop_back();
    for (int n : adj[b])
      if (!seen[n]) {
        seen[n] = 1;
        stack.push_back(n);
      }
  }
  std::vector<int> out;
  for (int b = 0; b < num_buses; ++b)
    if (!seen[b]) out.push_back(b);
  return out;
}

}  // namespace umpclear
