#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace owf {

/// Bad caller input: dimensions, bases, config values.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A turbine has no candidate cable within range.
class IsolatedNodeError : public std::runtime_error {
 public:
  explicit IsolatedNodeError(int node)
      : std::runtime_error("turbine " + std::to_string(node) +
                           " has no candidate cable within range"),
        node_(node) {}
  int node() const noexcept { return node_; }

 private:
  int node_;
};

/// Topology is not a substation-rooted forest (cycle, stranded component).
class StructureError : public std::runtime_error {
 public:
  StructureError(const std::string& what, std::vector<int> component)
      : std::runtime_error(what), component_(std::move(component)) {}
  const std::vector<int>& component() const noexcept { return component_; }

 private:
  std::vector<int> component_;
};

}  // namespace owf
