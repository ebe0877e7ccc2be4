#include "rggm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace rggm::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Dataset parse_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    std::vector<double> vals(cells.size());
    bool numeric = true;
    for (std::size_t k = 0; k < cells.size(); ++k) numeric = numeric && parse_number(cells[k], vals[k]);
    if (width == 0) {
      width = cells.size();
      if (!numeric) {
        for (const auto& c : cells)
          if (c.empty()) throw InputError("line " + std::to_string(lineno) + ": empty header cell");
        header = cells;
        continue;
      }
    }
    if (cells.size() != width)
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(width) + " cells, found " +
                       std::to_string(cells.size()));
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (cells[k].empty()) throw InputError("line " + std::to_string(lineno) + ": missing value");
      if (!parse_number(cells[k], vals[k]) || !std::isfinite(vals[k]))
        throw InputError("line " + std::to_string(lineno) + ": not a finite number: '" + cells[k] + "'");
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw InputError("no data rows");
  Dataset d(Matrix(static_cast<Index>(rows.size()), static_cast<Index>(width)));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) d.x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  if (header.empty())
    for (std::size_t j = 0; j < width; ++j) header.push_back("x" + std::to_string(j + 1));
  d.names = std::move(header);
  return d;
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return parse_csv(in);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Dataset& d) {
  for (Index j = 0; j < d.p(); ++j) {
    if (j) out << ',';
    out << (static_cast<std::size_t>(j) < d.names.size() ? d.names[static_cast<std::size_t>(j)]
                                                          : "x" + std::to_string(j + 1));
  }
  out << '\n';
  for (Index i = 0; i < d.n(); ++i) {
    for (Index j = 0; j < d.p(); ++j) {
      if (j) out << ',';
      out << format_double(d.x(i, j));
    }
    out << '\n';
  }
}

void write_csv(const std::string& path, const Dataset& d) {
  std::ostringstream ss;
  write_csv(ss, d);
  write_text(path, ss.str());
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
  const auto n = j.size();
  const auto m = j[0].size();
  Matrix out(static_cast<Index>(n), static_cast<Index>(m));
  for (std::size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != m) throw InputError("matrix rows have unequal length");
    for (std::size_t c = 0; c < m; ++c) {
      if (!j[r][c].is_number()) throw InputError("matrix entry is not a number");
      out(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
    }
  }
  return out;
}

Json to_json(const EdgeSet& e) {
  Json out = Json::array();
  for (const auto& [i, j] : e.edges) out.push_back(Json::array({i + 1, j + 1}));
  return out;
}

EdgeSet edges_from_json(const Json& j, Index p) {
  if (!j.is_array()) throw InputError("edge list must be an array");
  EdgeSet e(p);
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer())
      throw InputError("edge must be a pair of integers");
    const Index a = pair[0].get<Index>() - 1;
    const Index b = pair[1].get<Index>() - 1;
    if (a == b || a < 0 || b < 0 || a >= p || b >= p) throw InputError("edge index out of range");
    e.add(a, b);
  }
  return e;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

}  // namespace rggm::io
