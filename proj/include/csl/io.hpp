// io.hpp
// Deterministic output helpers: CSV tables with full-precision doubles, a
// stable config hash, the per-run manifest, and crystal-state snapshots.
#pragma once

#include <string>
#include <vector>
#include "csl/crystal.hpp"

namespace csl {

// Formats a double with %.17g (round-trip exact).
std::string format_double(double v);

// Writes a CSV file: one header row, then rows of %.17g cells.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// FNV-1a (64-bit) over the raw bytes, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

// Writes run.json next to the outputs: config hash, seed, tool version and
// wall time in seconds.
void write_run_manifest(const std::string& path, const std::string& config_text,
                        unsigned long long seed, double wall_seconds);

extern const char* const kToolVersion;

// Ion model round-trip: kind, charge, smoothing order, inline table.
std::string ion_model_to_json(const IonDensityModel& m);
IonDensityModel ion_model_from_json(const std::string& text);

// Crystal-state snapshots (JSON): grid, ion model, psi as interleaved
// re/im pairs, ion positions and momenta.
std::string crystal_state_to_json(const CrystalState& X);
CrystalState crystal_state_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace csl
