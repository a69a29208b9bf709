#pragma once

#include <string>
#include <string_view>

#include "owf/milp.hpp"

namespace owf {

/// MPS text with NAME/ROWS/COLUMNS/RHS/BOUNDS/ENDATA sections. Binaries are
/// declared as BV bounds, other integer columns inside MARKER blocks. Numbers
/// are written with round-trip precision, so fields are whitespace separated.
std::string export_mps(const MilpModel& model);

/// Reads the dialect written by export_mps (minimisation, one N row).
MilpModel parse_mps(std::string_view text);

class MpsParseError : public std::runtime_error {
 public:
  MpsParseError(int line, const std::string& what)
      : std::runtime_error("MPS line " + std::to_string(line) + ": " + what) {}
};

}  // namespace owf
