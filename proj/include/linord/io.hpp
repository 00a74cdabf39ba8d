#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "linord/ordb.hpp"
#include "linord/relation.hpp"

namespace linord {

// An OrdB configuration file:
//
//   # comment
//   k = 2                 optional, must match the predicate count
//   l = auto              or a number ("ell" also accepted)
//   w = 3l                or a number
//   predicates = C, Q     C, Q, Squares, empty or bits:0110...
//   n = 30000             optional default domain
//   mode = sound          optional; otherwise sound exactly when w = 3l
struct RunConfig {
  OrdBConfig ordb;
  std::optional<Element> n;
};

// Throws ConfigError with the offending line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// A structure description file:
//
//   n = 12
//   builtins = lt, ordc, C, Q
//   config = toy.cfg              needed by ordb and pi, relative to the file
//   relation E/2 = (0,1) (1,2)
//   relation P/1 = 3 5 7
//   alphabet = abe                optional, defaults to the letters of the word
//   word = abaabab...             |word| = n + 1; adds Q_a, Q_b, ...
//
// n may be omitted when a word is given.
FiniteStructure parse_structure(std::string_view text,
                                const std::filesystem::path& base_dir = {});
FiniteStructure load_structure(const std::filesystem::path& path);

// "element,rank" header followed by one line per element.
std::string rank_csv(const OrdBOrder& order);
OrdBOrder parse_rank_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace linord
