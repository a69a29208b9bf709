#include "owf/mps.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace owf {
namespace {

constexpr const char* kObjRow = "COST";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void field_line(std::string& out, std::string_view code, std::string_view a, std::string_view b,
                std::string_view c) {
  // classic column positions where the names fit, plain spacing otherwise
  char buf[256];
  std::snprintf(buf, sizeof buf, " %-2.*s %-8.*s  %-8.*s  %.*s\n", static_cast<int>(code.size()), code.data(),
                static_cast<int>(a.size()), a.data(), static_cast<int>(b.size()), b.data(),
                static_cast<int>(c.size()), c.data());
  out += buf;
}

}  // namespace

std::string export_mps(const MilpModel& model) {
  std::string out;
  out += "NAME          " + model.name + "\n";
  out += "ROWS\n";
  out += " N  " + std::string(kObjRow) + "\n";
  for (const auto& r : model.rows) {
    const char* code = r.sense == RowSense::LessEqual ? "L" : r.sense == RowSense::Equal ? "E" : "G";
    out += " " + std::string(code) + "  " + r.name + "\n";
  }

  // column-major view of the rows
  std::vector<std::vector<std::pair<int, double>>> by_col(model.columns.size());
  for (int r = 0; r < model.num_rows(); ++r)
    for (const auto& [c, v] : model.rows[static_cast<std::size_t>(r)].coefs)
      by_col[static_cast<std::size_t>(c)].emplace_back(r, v);

  out += "COLUMNS\n";
  bool in_marker = false;
  int marker_id = 0;
  for (std::size_t j = 0; j < model.columns.size(); ++j) {
    const Column& col = model.columns[j];
    const bool general_int = col.integer && !(col.lower == 0.0 && col.upper == 1.0);
    if (general_int != in_marker) {
      const std::string mk = "MARKER" + std::to_string(marker_id++);
      out += "    " + mk + "  'MARKER'  " + (general_int ? "'INTORG'" : "'INTEND'") + "\n";
      in_marker = general_int;
    }
    if (col.cost != 0.0 || by_col[j].empty()) field_line(out, "", col.name, kObjRow, num(col.cost));
    for (const auto& [r, v] : by_col[j]) field_line(out, "", col.name, model.rows[static_cast<std::size_t>(r)].name, num(v));
  }
  if (in_marker) out += "    MARKER" + std::to_string(marker_id) + "  'MARKER'  'INTEND'\n";

  out += "RHS\n";
  for (const auto& r : model.rows)
    if (r.rhs != 0.0) field_line(out, "", "RHS", r.name, num(r.rhs));

  out += "BOUNDS\n";
  for (const auto& col : model.columns) {
    if (col.is_binary() && col.lower == 0.0 && col.upper == 1.0) {
      field_line(out, "BV", "BND", col.name, "");
      continue;
    }
    if (col.lower == col.upper) {
      field_line(out, "FX", "BND", col.name, num(col.lower));
      continue;
    }
    if (std::isinf(col.lower) && std::isinf(col.upper)) {
      field_line(out, "FR", "BND", col.name, "");
      continue;
    }
    if (std::isinf(col.lower))
      field_line(out, "MI", "BND", col.name, "");
    else if (col.lower != 0.0 || col.integer)
      field_line(out, "LO", "BND", col.name, num(col.lower));
    if (!std::isinf(col.upper)) field_line(out, "UP", "BND", col.name, num(col.upper));
  }
  out += "ENDATA\n";
  return out;
}

MilpModel parse_mps(std::string_view text) {
  enum class Section { None, Rows, Columns, Rhs, Bounds, End };
  MilpModel model;
  model.name.clear();
  std::unordered_map<std::string, int> row_index, col_index;
  std::string objective_row;
  std::vector<std::vector<std::pair<int, double>>> row_coefs;
  bool integer_block = false;
  Section section = Section::None;

  auto parse_num = [](const std::string& s, int line) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw MpsParseError(line, "bad number '" + s + "'");
    return v;
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw[0] == '*') continue;
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (raw[0] != ' ' && raw[0] != '\t') {
      const std::string& head = tok[0];
      if (head == "NAME") {
        model.name = tok.size() > 1 ? tok[1] : "";
        section = Section::None;
      } else if (head == "ROWS") {
        section = Section::Rows;
      } else if (head == "COLUMNS") {
        section = Section::Columns;
      } else if (head == "RHS") {
        section = Section::Rhs;
      } else if (head == "BOUNDS") {
        section = Section::Bounds;
      } else if (head == "ENDATA") {
        section = Section::End;
        break;
      } else {
        throw MpsParseError(line_no, "unsupported section " + head);
      }
      continue;
    }

    switch (section) {
      case Section::Rows: {
        if (tok.size() != 2) throw MpsParseError(line_no, "ROWS entry needs type and name");
        const std::string& type = tok[0];
        if (type == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          continue;
        }
        RowSense sense;
        if (type == "L") sense = RowSense::LessEqual;
        else if (type == "E") sense = RowSense::Equal;
        else if (type == "G") sense = RowSense::GreaterEqual;
        else throw MpsParseError(line_no, "unknown row type " + type);
        if (!row_index.emplace(tok[1], model.num_rows()).second)
          throw MpsParseError(line_no, "duplicate row " + tok[1]);
        model.rows.push_back(Row{tok[1], {}, sense, 0.0});
        row_coefs.emplace_back();
        break;
      }
      case Section::Columns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") integer_block = true;
          else if (tok[2] == "'INTEND'") integer_block = false;
          else throw MpsParseError(line_no, "unknown marker " + tok[2]);
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5) throw MpsParseError(line_no, "COLUMNS entry malformed");
        auto [it, fresh] = col_index.emplace(tok[0], model.num_columns());
        if (fresh) {
          Column c;
          c.name = tok[0];
          c.integer = integer_block;
          model.columns.push_back(c);
        } else if (it->second != model.num_columns() - 1) {
          throw MpsParseError(line_no, "column " + tok[0] + " is not contiguous");
        }
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double v = parse_num(tok[k + 1], line_no);
          if (tok[k] == objective_row) {
            model.columns[static_cast<std::size_t>(it->second)].cost = v;
            continue;
          }
          auto r = row_index.find(tok[k]);
          if (r == row_index.end()) throw MpsParseError(line_no, "unknown row " + tok[k]);
          row_coefs[static_cast<std::size_t>(r->second)].emplace_back(it->second, v);
        }
        break;
      }
      case Section::Rhs: {
        if (tok.size() != 3 && tok.size() != 5) throw MpsParseError(line_no, "RHS entry malformed");
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          if (tok[k] == objective_row) continue;
          auto r = row_index.find(tok[k]);
          if (r == row_index.end()) throw MpsParseError(line_no, "unknown row " + tok[k]);
          model.rows[static_cast<std::size_t>(r->second)].rhs = parse_num(tok[k + 1], line_no);
        }
        break;
      }
      case Section::Bounds: {
        if (tok.size() < 3) throw MpsParseError(line_no, "BOUNDS entry malformed");
        auto c = col_index.find(tok[2]);
        if (c == col_index.end()) throw MpsParseError(line_no, "unknown column " + tok[2]);
        Column& col = model.columns[static_cast<std::size_t>(c->second)];
        const std::string& type = tok[0];
        auto value = [&] {
          if (tok.size() < 4) throw MpsParseError(line_no, type + " bound needs a value");
          return parse_num(tok[3], line_no);
        };
        if (type == "UP") col.upper = value();
        else if (type == "LO") col.lower = value();
        else if (type == "FX") col.lower = col.upper = value();
        else if (type == "FR") { col.lower = -kInf; col.upper = kInf; }
        else if (type == "MI") col.lower = -kInf;
        else if (type == "PL") col.upper = kInf;
        else if (type == "BV") { col.integer = true; col.lower = 0.0; col.upper = 1.0; }
        else throw MpsParseError(line_no, "unsupported bound type " + type);
        break;
      }
      default:
        throw MpsParseError(line_no, "data outside a section");
    }
  }
  if (section != Section::End) throw MpsParseError(line_no, "missing ENDATA");

  // rebuild rows through add_row for canonical coefficient order
  std::vector<Row> rows = std::move(model.rows);
  model.rows.clear();
  for (std::size_t r = 0; r < rows.size(); ++r)
    model.add_row(rows[r].name, std::move(row_coefs[r]), rows[r].sense, rows[r].rhs);
  return model;
}

}  // namespace owf
