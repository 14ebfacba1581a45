#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "edrisk/util.hpp"

namespace edrisk {

// A duplicate-free, ascending set of CCS codes.
using Itemset = std::vector<int>;

inline Itemset make_itemset(std::vector<int> codes) {
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  return codes;
}

// a subset-of b; both sorted ascending.
inline bool itemset_subsumes(const Itemset& a, const Itemset& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

struct ItemsetHash {
  std::size_t operator()(const Itemset& s) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int v : s) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::string itemset_to_string(const Itemset& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out;
}

inline Itemset itemset_from_string(std::string_view text) {
  Itemset out;
  for (const std::string& tok : split(text, ',')) {
    auto v = parse_int(tok);
    if (!v) throw Error("bad itemset element: '" + tok + "'");
    out.push_back(static_cast<int>(*v));
  }
  return make_itemset(std::move(out));
}

}  // namespace edrisk
