#pragma once

// Versioned text format for codebook sets.
//
//   scma-codebook
//   version 1
//   K 4
//   J 3
//   M 4
//   N 2
//   sigma2 0.01
//   varsigma2 5
//   Pe 30
//   labeling natural-binary
//   graph
//   <K rows of J space-separated 0/1>
//   user 1
//   <N rows of M values>          (row n = n-th resource of the user's support)
//   ...
//   gains 1                       (optional, only for non-unit channels)
//   <K values>
//   end
//
// Numbers are written in shortest round-trip form, so parse followed by
// serialize reproduces the input bytes. Lines starting with '#' are ignored.

#include <filesystem>
#include <string>
#include <string_view>

#include "scma/model.hpp"

namespace scma {

inline constexpr int kCodebookFormatVersion = 1;

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

std::string serialize_codebook(const CodebookSet& set);

/// Throws FormatError on malformed text, plus the model errors of CodebookSet.
CodebookSet parse_codebook(std::string_view text);

CodebookSet read_codebook_file(const std::filesystem::path& path);
void write_codebook_file(const std::filesystem::path& path, const CodebookSet& set);

}  // namespace scma
