#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "rggm/eval.hpp"

namespace rggm::io {

using Json = nlohmann::ordered_json;

/// Comma-separated floats, one observation per row. A first row containing
/// any non-numeric cell is taken as the header. Ragged rows, empty cells and
/// non-finite values raise InputError naming the line.
Dataset parse_csv(std::istream& in);
Dataset read_csv(const std::string& path);
void write_csv(std::ostream& out, const Dataset& d);
void write_csv(const std::string& path, const Dataset& d);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Rows of the dense matrix.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
/// [[i, j], ...] one-based, i < j.
Json to_json(const EdgeSet& e);
EdgeSet edges_from_json(const Json& j, Index p);

Json read_json(const std::string& path);
/// Two-space indentation and a trailing newline.
void write_json(const std::string& path, const Json& j);
void write_text(const std::string& path, const std::string& text);

}  // namespace rggm::io
