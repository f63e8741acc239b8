#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "skillforge/constrained.hpp"

namespace skillforge {

/// argv[0] is the program name. Exit codes: 0 ok, 2 usage error, 1 any
/// failure inside a module (its `module:kind` name goes to `err`).
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// Re-runs the command recorded in a run report.
int replay(const std::filesystem::path& report, std::ostream& out, std::ostream& err);

/// `key=val,key=val`; a repeated key is a usage error.
[[nodiscard]] std::map<std::string, std::string> parse_params(const std::string& text);
/// `node:x1:...:xd;node:...`. Node 0 and k-1 become initial/final pins.
[[nodiscard]] ConstraintSet parse_pins(const std::string& text, std::size_t k, double confidence = 1.0);
/// `v;v;...`
[[nodiscard]] std::vector<double> parse_list(const std::string& text);

}  // namespace skillforge
