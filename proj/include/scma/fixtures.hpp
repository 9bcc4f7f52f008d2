#pragma once

#include <span>
#include <string_view>

#include "scma/model.hpp"

namespace scma {

struct FixtureInfo {
  std::string_view name;
  std::string_view description;
  std::string_view text;  ///< canonical codebook file contents
};

/// dr-j3, ls-j3, ls-j4, ls-j5, ls-j6.
std::span<const FixtureInfo> fixtures();

/// Throws IndexError for an unknown name.
const FixtureInfo& fixture(std::string_view name);

CodebookSet load_fixture(std::string_view name);

}  // namespace scma
