#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "random.hpp"

namespace designsearch {

// Malformed instance text.
class ParseError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a problem or design invariant.
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A candidate that does not partition the elements. Always an encoder bug.
class StructureError : public std::logic_error {
  using std::logic_error::logic_error;
};

struct Use {
  int method = 0;
  int attribute = 0;

  friend bool operator==(const Use&, const Use&) = default;
  friend auto operator<=>(const Use&, const Use&) = default;
};

// Class label per element, labels in [0, class_count).
struct Assignment {
  std::vector<int> class_of;
  int class_count = 0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

class DesignProblem;

// A partition of all elements into exactly c classes. Class order and the
// order of elements inside a class carry no meaning.
class Design {
 public:
  Design() = default;
  Design(std::vector<std::vector<int>> classes, bool feasible)
      : classes_(std::move(classes)), feasible_(feasible) {}

  static Design from_assignment(const Assignment& assignment, const DesignProblem& problem);

  const std::vector<std::vector<int>>& classes() const noexcept { return classes_; }
  int class_count() const noexcept { return static_cast<int>(classes_.size()); }
  bool feasible() const noexcept { return feasible_; }

  // Sorted classes, each sorted; equal designs have equal canonical forms.
  std::vector<std::vector<int>> canonical() const {
    auto out = classes_;
    for (auto& cls : out) std::sort(cls.begin(), cls.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  // Assumes the partition property; see validate_design.
  Assignment assignment(int element_count) const {
    Assignment a{std::vector<int>(static_cast<std::size_t>(element_count), -1), class_count()};
    for (int k = 0; k < class_count(); ++k)
      for (int e : classes_[static_cast<std::size_t>(k)]) a.class_of[static_cast<std::size_t>(e)] = k;
    return a;
  }

  friend bool operator==(const Design& a, const Design& b) { return a.canonical() == b.canonical(); }

 private:
  std::vector<std::vector<int>> classes_;
  bool feasible_ = false;
};

// Elements 0..A-1 are attributes, A..A+M-1 are methods.
class DesignProblem {
 public:
  DesignProblem(std::string name, std::vector<std::string> attributes, std::vector<std::string> methods,
                std::vector<Use> uses, int class_count, std::optional<Design> manual_design = std::nullopt)
      : name_(std::move(name)),
        attributes_(std::move(attributes)),
        methods_(std::move(methods)),
        uses_(std::move(uses)),
        class_count_(class_count) {
    validate();
    if (manual_design) set_manual_design(std::move(*manual_design));
  }

  // Unnamed elements get labels a<i> / m<j>.
  static DesignProblem with_counts(std::string name, int attributes, int methods, std::vector<Use> uses,
                                   int class_count) {
    if (attributes < 1 || methods < 1) throw ValidationError("attribute and method counts must be positive");
    std::vector<std::string> an, mn;
    for (int i = 0; i < attributes; ++i) an.push_back("a" + std::to_string(i));
    for (int j = 0; j < methods; ++j) mn.push_back("m" + std::to_string(j));
    return DesignProblem(std::move(name), std::move(an), std::move(mn), std::move(uses), class_count);
  }

  const std::string& name() const noexcept { return name_; }
  int attribute_count() const noexcept { return static_cast<int>(attributes_.size()); }
  int method_count() const noexcept { return static_cast<int>(methods_.size()); }
  int element_count() const noexcept { return attribute_count() + method_count(); }
  int use_count() const noexcept { return static_cast<int>(uses_.size()); }
  int class_count() const noexcept { return class_count_; }
  const std::vector<Use>& uses() const noexcept { return uses_; }
  const std::vector<std::string>& attribute_names() const noexcept { return attributes_; }
  const std::vector<std::string>& method_names() const noexcept { return methods_; }
  const std::optional<Design>& manual_design() const noexcept { return manual_design_; }

  bool is_attribute(int element) const noexcept { return element < attribute_count(); }
  bool is_method(int element) const noexcept { return element >= attribute_count(); }
  int method_element(int method) const noexcept { return attribute_count() + method; }

  const std::string& element_name(int element) const {
    return is_attribute(element) ? attributes_.at(static_cast<std::size_t>(element))
                                 : methods_.at(static_cast<std::size_t>(element - attribute_count()));
  }

  void set_manual_design(Design design);

 private:
  void validate() const {
    if (attributes_.empty() || methods_.empty())
      throw ValidationError("problem needs at least one attribute and one method");
    if (class_count_ < 1) throw ValidationError("class count must be at least 1");
    if (class_count_ > std::min(attribute_count(), method_count()))
      throw ValidationError("class count " + std::to_string(class_count_) +
                            " exceeds min(attributes, methods); no feasible design exists");
    std::set<Use> seen;
    for (const auto& u : uses_) {
      if (u.method < 0 || u.method >= method_count() || u.attribute < 0 || u.attribute >= attribute_count())
        throw ValidationError("use (" + std::to_string(u.method) + ", " + std::to_string(u.attribute) +
                              ") is out of range");
      if (!seen.insert(u).second)
        throw ValidationError("duplicate use (" + std::to_string(u.method) + ", " + std::to_string(u.attribute) +
                              ")");
    }
  }

  std::string name_;
  std::vector<std::string> attributes_;
  std::vector<std::string> methods_;
  std::vector<Use> uses_;
  int class_count_ = 1;
  std::optional<Design> manual_design_;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<int> offending_classes;
};

// Checks the partition property and the one-attribute-one-method rule.
inline FeasibilityReport validate_design(const Design& design, const DesignProblem& problem) {
  if (design.class_count() != problem.class_count())
    throw StructureError("design has " + std::to_string(design.class_count()) + " classes, problem requires " +
                         std::to_string(problem.class_count()));
  std::vector<char> seen(static_cast<std::size_t>(problem.element_count()), 0);
  std::size_t total = 0;
  FeasibilityReport report;
  for (int k = 0; k < design.class_count(); ++k) {
    bool has_attr = false, has_method = false;
    for (int e : design.classes()[static_cast<std::size_t>(k)]) {
      if (e < 0 || e >= problem.element_count())
        throw StructureError("element index " + std::to_string(e) + " out of range");
      if (seen[static_cast<std::size_t>(e)]++) throw StructureError("element " + std::to_string(e) + " appears twice");
      ++total;
      (problem.is_attribute(e) ? has_attr : has_method) = true;
    }
    if (!has_attr || !has_method) report.offending_classes.push_back(k);
  }
  if (total != static_cast<std::size_t>(problem.element_count()))
    throw StructureError("design does not cover every element");
  report.feasible = report.offending_classes.empty();
  return report;
}

// Feasibility of an assignment; cheap, no allocation beyond two counters.
inline bool is_feasible(const Assignment& a, const DesignProblem& problem) {
  std::vector<int> attrs(static_cast<std::size_t>(a.class_count), 0);
  std::vector<int> methods(static_cast<std::size_t>(a.class_count), 0);
  const int n_attr = problem.attribute_count();
  for (int e = 0; e < static_cast<int>(a.class_of.size()); ++e)
    ++(e < n_attr ? attrs : methods)[static_cast<std::size_t>(a.class_of[static_cast<std::size_t>(e)])];
  for (int k = 0; k < a.class_count; ++k)
    if (attrs[static_cast<std::size_t>(k)] == 0 || methods[static_cast<std::size_t>(k)] == 0) return false;
  return true;
}

inline Design Design::from_assignment(const Assignment& assignment, const DesignProblem& problem) {
  std::vector<std::vector<int>> classes(static_cast<std::size_t>(assignment.class_count));
  for (int e = 0; e < static_cast<int>(assignment.class_of.size()); ++e)
    classes[static_cast<std::size_t>(assignment.class_of[static_cast<std::size_t>(e)])].push_back(e);
  return Design(std::move(classes), is_feasible(assignment, problem));
}

inline void DesignProblem::set_manual_design(Design design) {
  const auto report = validate_design(design, *this);
  manual_design_ = Design(design.classes(), report.feasible);
}

// ---------------------------------------------------------------------------
// Instance files (JSON syntax).

inline DesignProblem problem_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {"name", "attributes", "methods", "uses", "classes", "manual_design"};
  if (!j.is_object()) throw ParseError("instance must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ParseError("unknown key \"" + key + "\"");
  for (const char* key : {"name", "attributes", "methods", "uses", "classes"})
    if (!j.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");

  try {
    auto name = j.at("name").get<std::string>();
    auto attributes = j.at("attributes").get<std::vector<std::string>>();
    auto methods = j.at("methods").get<std::vector<std::string>>();
    std::vector<Use> uses;
    for (const auto& pair : j.at("uses")) {
      if (!pair.is_array() || pair.size() != 2) throw ParseError("each use must be a [method, attribute] pair");
      uses.push_back({pair[0].get<int>(), pair[1].get<int>()});
    }
    const int classes = j.at("classes").get<int>();
    std::optional<Design> manual;
    if (j.contains("manual_design")) {
      auto cls = j.at("manual_design").get<std::vector<std::vector<int>>>();
      manual = Design(std::move(cls), false);
    }
    return DesignProblem(std::move(name), std::move(attributes), std::move(methods), std::move(uses), classes,
                         std::move(manual));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("instance has wrong value types: ") + e.what());
  } catch (const StructureError& e) {
    throw ValidationError(std::string("manual_design: ") + e.what());
  }
}

inline nlohmann::json problem_to_json(const DesignProblem& p) {
  nlohmann::json j;
  j["name"] = p.name();
  j["attributes"] = p.attribute_names();
  j["methods"] = p.method_names();
  auto uses = nlohmann::json::array();
  for (const auto& u : p.uses()) uses.push_back({u.method, u.attribute});
  j["uses"] = std::move(uses);
  j["classes"] = p.class_count();
  if (p.manual_design()) j["manual_design"] = p.manual_design()->classes();
  return j;
}

inline DesignProblem parse_problem(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed instance: ") + e.what());
  }
  return problem_from_json(j);
}

inline DesignProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

inline void save_problem(const DesignProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << problem_to_json(p).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Planted-partition instance generator.

struct InstanceSpec {
  int attributes = 16;
  int methods = 15;
  int uses = 39;
  int classes = 5;
  double planted_modularity = 0.85;
  std::uint64_t seed = 1;
  std::string name = "synthetic";
};

// Random feasible partition: one attribute and one method per class first,
// the rest uniformly.
inline Assignment random_feasible_partition(int attributes, int methods, int classes, Rng& rng) {
  Assignment a{std::vector<int>(static_cast<std::size_t>(attributes + methods)), classes};
  auto place = [&](int first, int count) {
    std::vector<int> order(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = first + i;
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < count; ++i)
      a.class_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
          i < classes ? i : uniform_int(rng, 0, classes - 1);
  };
  place(0, attributes);
  place(attributes, methods);
  return a;
}

// Exactly spec.uses unique uses; round(modularity * U) of them fall inside a
// block of the planted partition when enough internal pairs exist (otherwise
// the surplus spills to the other side).
inline DesignProblem generate_instance(const InstanceSpec& spec) {
  if (spec.attributes < 1 || spec.methods < 1) throw ValidationError("attribute and method counts must be positive");
  if (spec.classes < 1 || spec.classes > std::min(spec.attributes, spec.methods))
    throw ValidationError("class count must lie in [1, min(attributes, methods)]");
  if (spec.uses < 1 || static_cast<long>(spec.uses) > static_cast<long>(spec.attributes) * spec.methods)
    throw ValidationError("use count must lie in [1, attributes * methods]");
  if (!(spec.planted_modularity >= 0.0 && spec.planted_modularity <= 1.0))
    throw ValidationError("planted modularity must lie in [0, 1]");

  Rng rng(derive_seed(spec.seed, 0x1457a4ceULL));
  const Assignment planted = random_feasible_partition(spec.attributes, spec.methods, spec.classes, rng);

  std::vector<Use> internal, cross;
  for (int m = 0; m < spec.methods; ++m)
    for (int at = 0; at < spec.attributes; ++at) {
      const bool same = planted.class_of[static_cast<std::size_t>(at)] ==
                        planted.class_of[static_cast<std::size_t>(spec.attributes + m)];
      (same ? internal : cross).push_back({m, at});
    }
  std::shuffle(internal.begin(), internal.end(), rng);
  std::shuffle(cross.begin(), cross.end(), rng);

  long want_internal = std::lround(spec.planted_modularity * spec.uses);
  want_internal = std::min<long>(want_internal, static_cast<long>(internal.size()));
  long want_cross = spec.uses - want_internal;
  if (want_cross > static_cast<long>(cross.size())) {
    want_cross = static_cast<long>(cross.size());
    want_internal = spec.uses - want_cross;
  }

  std::vector<Use> uses(internal.begin(), internal.begin() + want_internal);
  uses.insert(uses.end(), cross.begin(), cross.begin() + want_cross);
  std::sort(uses.begin(), uses.end());

  auto problem = DesignProblem::with_counts(spec.name, spec.attributes, spec.methods, std::move(uses), spec.classes);
  problem.set_manual_design(Design::from_assignment(planted, problem));
  return problem;
}

}  // namespace designsearch
