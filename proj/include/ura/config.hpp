#pragma once

#include "ura/harness.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ura {

/// Named experiment presets: paper, paper_fig1, desk, amp_desk, collide, tiny.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Applies `key = value` lines (with `#` comments) on top of `base`.
/// Errors are ConfigError with a "source:line: message" prefix.
ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig base = {});

/// A preset name, or a path to a key-value file. A file may start from a
/// preset with `preset = <name>` on its first non-comment line.
ExperimentConfig load_config(const std::string& name_or_path);

/// Writes every key in the file format understood by parse_config.
void write_config(std::ostream& os, const ExperimentConfig& cfg);

/// Parses "a:step:b" (inclusive) or "a,b,c" lists.
std::vector<double> parse_range(const std::string& text);

}  // namespace ura
