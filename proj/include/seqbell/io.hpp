#pragma once

#include <string>
#include <vector>

#include "seqbell/filtering.hpp"
#include "seqbell/lhv.hpp"

namespace seqbell {

struct InvalidSettingsFile : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// State files are JSON: {"dims": [dA, dB], "matrix": [[re, im], ...]} with the
// matrix row-major and composite index a*dB + b on rows and columns. Values
// use shortest round-trip decimal form, so load(save(s)) is bit-exact.

std::string state_to_json_text(const BipartiteState& s);
BipartiteState state_from_json_text(const std::string& text);

BipartiteState load_state(const std::string& path);
void save_state(const BipartiteState& s, const std::string& path);

/// Local operator files reuse the state schema with dims [d, 1].
Matrix load_local_density(const std::string& path);

std::string report_to_json_text(const SimulationReport& r);
std::string sequential_report_to_json_text(const SequentialMcReport& r);

/// Settings file: JSON array of pairs; element shape depends on the model
/// ({"x","y"} Bloch vectors, {"obs_a","obs_b"} 3x3 matrices, or
/// {"povm_a","povm_b"} lists of matrices; matrices are row-major [re, im]
/// pair lists).
std::vector<SettingPair> load_settings(LhvModel model, const std::string& path);

/// CHSH settings file: {"a1": [...], "a2": [...], "b1": [...], "b2": [...]}.
ChshSettings load_chsh_settings(const std::string& path);

std::string format_double(double v);  // 17 significant digits, C locale

}  // namespace seqbell
