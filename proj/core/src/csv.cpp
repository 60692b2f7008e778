#include "privcore/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "privcore/error.hpp"

namespace privcore {

namespace {

[[noreturn]] void parse_error(std::string_view source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse,
              std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::optional<double> parse_real(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return value;
}

void append_real(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

}  // namespace

Dataset parse_csv(std::string_view text, const RoleOverrides& roles, std::string_view source) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  {
    std::size_t line_no = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (!trim(line).empty()) lines.emplace_back(line_no, line);
      ++line_no;
      start = end + 1;
    }
  }
  if (lines.empty()) parse_error(source, 1, "missing header row");

  std::vector<ColumnSpec> columns;
  std::set<std::string, std::less<>> seen;
  for (std::string_view cell : split_cells(lines.front().second)) {
    std::string name = unquote(cell);
    if (name.empty()) parse_error(source, lines.front().first, "empty column name");
    if (!seen.insert(name).second) {
      parse_error(source, lines.front().first, "duplicate column '" + name + "'");
    }
    std::optional<Role> role;
    if (auto it = roles.find(name); it != roles.end()) {
      if (it->second != "feature") {
        role = parse_role(it->second);
        if (!role) {
          parse_error(source, lines.front().first,
                      "unknown role '" + it->second + "' for column '" + name + "'");
        }
      }
    } else {
      role = parse_role(name);
    }
    columns.push_back({std::move(name), role});
  }
  for (const auto& [name, role_name_value] : roles) {
    if (!seen.contains(name)) {
      parse_error(source, lines.front().first, "role given for unknown column '" + name + "'");
    }
    if (role_name_value != "feature" && !parse_role(role_name_value)) {
      parse_error(source, lines.front().first,
                  "unknown role '" + role_name_value + "' for column '" + name + "'");
    }
  }
  {
    std::set<Role> used;
    for (const auto& c : columns) {
      if (c.role && !used.insert(*c.role).second) {
        parse_error(source, lines.front().first,
                    "role '" + std::string(role_name(*c.role)) + "' assigned twice");
      }
    }
  }

  const std::size_t n = lines.size() - 1;
  if (n == 0) parse_error(source, lines.front().first, "no data rows");
  std::vector<std::vector<double>> values(columns.size(), std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& [line_no, line] = lines[r + 1];
    const auto cells = split_cells(line);
    if (cells.size() != columns.size()) {
      parse_error(source, line_no,
                  "expected " + std::to_string(columns.size()) + " cells, got " +
                      std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto value = parse_real(cells[c]);
      if (!value) {
        parse_error(source, line_no,
                    "column '" + columns[c].name + "': not a number: '" + std::string(cells[c]) + "'");
      }
      if (!std::isfinite(*value)) {
        parse_error(source, line_no, "column '" + columns[c].name + "': non-finite value");
      }
      if (columns[c].role && is_categorical(*columns[c].role) &&
          (*value < 0.0 || std::floor(*value) != *value || *value > 1e9)) {
        parse_error(source, line_no,
                    "column '" + columns[c].name + "': class label must be a nonnegative integer");
      }
      values[c][r] = *value;
    }
  }

  std::vector<std::string> feature_names;
  for (const auto& c : columns) {
    if (!c.role) feature_names.push_back(c.name);
  }
  if (feature_names.empty()) parse_error(source, lines.front().first, "no feature columns");

  Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(feature_names.size()));
  Eigen::Index fj = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].role) continue;
    for (std::size_t r = 0; r < n; ++r) features(static_cast<Eigen::Index>(r), fj) = values[c][r];
    ++fj;
  }
  Dataset data(std::move(features), feature_names);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (!columns[c].role) continue;
    const Role role = *columns[c].role;
    if (is_categorical(role)) {
      CategoricalColumn col;
      col.labels.reserve(n);
      for (double v : values[c]) {
        col.labels.push_back(static_cast<int>(v));
        col.num_classes = std::max(col.num_classes, static_cast<int>(v) + 1);
      }
      data.set_categorical(role, std::move(col), columns[c].name);
    } else {
      data.set_continuous(role, Eigen::Map<const Vector>(values[c].data(), static_cast<Eigen::Index>(n)),
                          columns[c].name);
    }
  }
  data.set_column_order(std::move(columns));
  return data;
}

Dataset read_csv(const std::filesystem::path& path, const RoleOverrides& roles) {
  return parse_csv(read_text_file(path), roles, path.string());
}

std::string to_csv_string(const Dataset& data) {
  const auto& columns = data.columns();
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c > 0) out += ',';
    out += columns[c].name;
  }
  out += '\n';

  // Feature columns are stored in feature_names order; map by name.
  std::vector<Eigen::Index> feature_col(columns.size(), -1);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].role) continue;
    const auto& names = data.feature_names();
    feature_col[c] = std::find(names.begin(), names.end(), columns[c].name) - names.begin();
  }

  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c > 0) out += ',';
      if (!columns[c].role) {
        append_real(out, data.features()(row, feature_col[c]));
      } else if (is_categorical(*columns[c].role)) {
        out += std::to_string(data.categorical(*columns[c].role).labels[i]);
      } else {
        append_real(out, data.continuous(*columns[c].role)[row]);
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  write_text_file_atomic(path, to_csv_string(data));
}

void attach_manifest(Dataset& data, const GeneratorManifest& manifest) {
  if (manifest.hierarchy) {
    for (Role role : {Role::kCoarse, Role::kFine}) {
      if (!data.has(role)) continue;
      CategoricalColumn col = data.categorical(role);
      const int classes = role == Role::kCoarse ? manifest.hierarchy->num_coarse
                                                : manifest.hierarchy->num_fine();
      if (col.num_classes > classes) {
        throw Error(ErrorCode::kParse, "column '" + std::string(role_name(role)) +
                                           "' has labels beyond the manifest's class count");
      }
      col.num_classes = classes;
      std::string name;
      for (const auto& c : data.columns()) {
        if (c.role == role) name = c.name;
      }
      auto order = data.columns();
      data.set_categorical(role, std::move(col), name);
      data.set_column_order(std::move(order));
    }
  }
  data.set_manifest(manifest);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot rename onto '" + path.string() + "'");
  }
}

}  // namespace privcore
