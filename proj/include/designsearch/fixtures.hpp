#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "problem.hpp"
#include "random.hpp"

namespace designsearch {

struct ReferenceDesign {
  DesignProblem problem;
  Design design;
  double expected_f_cbo = 0.0;
};

namespace detail {

// Builds an instance whose reference design has the given per-class
// (attributes, methods) composition and exactly `cross` of `uses` uses
// crossing class boundaries.
inline ReferenceDesign build_reference(const std::string& name, const std::vector<std::pair<int, int>>& composition,
                                       int uses, int cross, double expected, std::uint64_t seed) {
  int attributes = 0, methods = 0;
  for (const auto& [a, m] : composition) {
    attributes += a;
    methods += m;
  }
  const int classes = static_cast<int>(composition.size());
  std::vector<std::vector<int>> members(static_cast<std::size_t>(classes));
  std::vector<int> attr_class, method_class;
  for (int k = 0; k < classes; ++k) {
    for (int i = 0; i < composition[static_cast<std::size_t>(k)].first; ++i) {
      members[static_cast<std::size_t>(k)].push_back(static_cast<int>(attr_class.size()));
      attr_class.push_back(k);
    }
    for (int j = 0; j < composition[static_cast<std::size_t>(k)].second; ++j) method_class.push_back(k);
  }
  for (int m = 0; m < methods; ++m)
    members[static_cast<std::size_t>(method_class[static_cast<std::size_t>(m)])].push_back(attributes + m);

  std::vector<Use> internal, external;
  for (int m = 0; m < methods; ++m)
    for (int a = 0; a < attributes; ++a)
      (attr_class[static_cast<std::size_t>(a)] == method_class[static_cast<std::size_t>(m)] ? internal : external)
          .push_back({m, a});
  Rng rng(seed);
  std::shuffle(internal.begin(), internal.end(), rng);
  std::shuffle(external.begin(), external.end(), rng);
  std::vector<Use> chosen(internal.begin(), internal.begin() + (uses - cross));
  chosen.insert(chosen.end(), external.begin(), external.begin() + cross);
  std::sort(chosen.begin(), chosen.end());

  std::vector<std::string> an, mn;
  for (int a = 0; a < attributes; ++a) an.push_back(name + ".attr" + std::to_string(a));
  for (int m = 0; m < methods; ++m) mn.push_back(name + ".op" + std::to_string(m));
  Design design(members, true);
  DesignProblem problem(name, std::move(an), std::move(mn), std::move(chosen), classes, design);
  return {std::move(problem), std::move(design), expected};
}

}  // namespace detail

// Hand-built stand-ins for three known manual designs. They match
// the original dimensions and cross-boundary use counts; class compositions
// were picked to land near the known elegance values.
inline std::vector<ReferenceDesign> reference_fixtures() {
  std::vector<ReferenceDesign> out;
  // 16 attributes, 15 methods, 39 uses, 5 classes, 6 crossing.
  out.push_back(detail::build_reference("CBS", {{2, 3}, {3, 3}, {3, 3}, {4, 3}, {4, 3}}, 39, 6, 84.6, 0xcb5));
  // 43 attributes, 12 methods, 121 uses, 5 classes, 36 crossing.
  out.push_back(detail::build_reference("GDP", {{7, 1}, {7, 2}, {9, 1}, {9, 6}, {11, 2}}, 121, 36, 70.3, 0x6d9));
  // 52 attributes, 30 methods, 126 uses, 16 classes, 57 crossing.
  out.push_back(detail::build_reference("SC",
                                        {{1, 1}, {1, 1}, {1, 3}, {2, 3}, {2, 3}, {3, 1}, {3, 3}, {3, 3},
                                         {4, 1}, {4, 1}, {4, 1}, {4, 2}, {4, 4}, {5, 1}, {5, 1}, {6, 1}},
                                        126, 57, 54.8, 0x5c));
  return out;
}

// Instance specs with the original dimensions, for synthetic benchmarks.
inline InstanceSpec cbs_dimensions(double modularity = 0.85, std::uint64_t seed = 1) {
  return {16, 15, 39, 5, modularity, seed, "CBS-synthetic"};
}
inline InstanceSpec gdp_dimensions(double modularity = 0.85, std::uint64_t seed = 1) {
  return {43, 12, 121, 5, modularity, seed, "GDP-synthetic"};
}
inline InstanceSpec sc_dimensions(double modularity = 0.85, std::uint64_t seed = 1) {
  return {52, 30, 126, 16, modularity, seed, "SC-synthetic"};
}

// Two attributes, two methods, uses (m0,a0), (m1,a1), (m0,a1), two classes.
inline DesignProblem toy_problem() {
  return DesignProblem::with_counts("T1", 2, 2, {{0, 0}, {1, 1}, {0, 1}}, 2);
}

}  // namespace designsearch
