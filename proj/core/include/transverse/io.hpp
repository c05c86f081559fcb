#pragma once

// Versioned JSON records {schema_version, type, payload} and CSV exports.
// Doubles are written in shortest round-trip form so every record reads
// back bit-identical.

#include <optional>
#include <string>
#include <vector>

#include "transverse/dns.hpp"
#include "transverse/hill.hpp"
#include "transverse/instability.hpp"
#include "transverse/wave.hpp"

namespace transverse {

inline constexpr int kSchemaVersion = 1;

// Everything the pipeline command produces for one parameter set.
struct PipelineReport {
  WaveProfile wave;
  std::optional<double> target_amplitude;
  SpectrumSummary lcal;
  PropositionReport propositions;
  HypothesisReport hypotheses;
  StabilityScan scan;
  std::optional<GrowthMeasurement> growth;
  GridDoubling doubling;
  std::string verdict;
};

std::string serialize(const WaveProfile& r);
std::string serialize(const SpectrumSummary& r);
std::string serialize(const PropositionReport& r);
std::string serialize(const HypothesisReport& r);
std::string serialize(const StabilityScan& r);
std::string serialize(const GrowthMeasurement& r);
std::string serialize(const GridDoubling& r);
std::string serialize(const PipelineReport& r);

// Throws FormatError on malformed text (with the byte offset), unknown
// schema versions and type mismatches.
WaveProfile parse_wave(const std::string& text);
SpectrumSummary parse_spectrum(const std::string& text);
PropositionReport parse_propositions(const std::string& text);
HypothesisReport parse_hypotheses(const std::string& text);
StabilityScan parse_scan(const std::string& text);
GrowthMeasurement parse_growth(const std::string& text);
GridDoubling parse_grid_doubling(const std::string& text);
PipelineReport parse_pipeline(const std::string& text);

// Type tag of an envelope, after the version check.
std::string record_type(const std::string& text);

// Header row plus one row per entry, %.17g, '\n' line endings.
std::string eigenvalues_csv(const SpectrumSummary& s);
std::string scan_csv(const StabilityScan& s);
std::string growth_csv(const GrowthMeasurement& g);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace transverse
