#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "privcore/dataset.hpp"

namespace privcore {

// Column name -> role name. Role names are y, z, coarse, fine, or "feature"
// to keep a conventionally named column as a feature. Columns not listed use
// the naming convention: a column called y/z/coarse/fine takes that role.
using RoleOverrides = std::map<std::string, std::string, std::less<>>;

// UTF-8, header row, comma separated, '.' decimal point. Throws kParse with
// the offending line and column for ragged rows, non-numeric or non-finite
// cells, non-integer class labels, and unknown role names.
Dataset parse_csv(std::string_view text, const RoleOverrides& roles = {},
                  std::string_view source = "<memory>");
Dataset read_csv(const std::filesystem::path& path, const RoleOverrides& roles = {});

// Shortest round-trip decimal for reals, integers for class labels.
std::string to_csv_string(const Dataset& data);
void write_csv(const Dataset& data, const std::filesystem::path& path);

// Attaches a generator manifest and, for hierarchical data, pins the class
// counts to the generator's (a subset may not contain every class).
void attach_manifest(Dataset& data, const GeneratorManifest& manifest);

std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it over the target.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace privcore
