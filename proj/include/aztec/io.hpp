#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aztec/dynamics.hpp"
#include "aztec/shuffling.hpp"
#include "aztec/stats.hpp"

namespace aztec::io {

// Thrown when input bytes cannot be decoded: malformed or truncated JSON,
// unknown schema tag, missing fields, or values inconsistent with the
// declared structure.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// How an artifact was produced.  Every serialized document embeds one of
// these, so re-running the recorded generator with the recorded seed and
// config reproduces the artifact byte for byte.
struct Provenance {
  std::string generator_id = "manual";
  std::uint64_t seed = 0;
  std::string config;  // free-form parameter summary, e.g. "order=8"

  bool operator==(const Provenance&) const = default;
};

// A recorded run of the interlaced dynamics.  frames has T+1 entries, the
// packed start first; replaying (n, T, seed) through the named generator
// regenerates the frames exactly.
struct TrajectoryFile {
  std::string generator_id;
  std::uint64_t seed = 0;
  unsigned n = 0;
  unsigned long T = 0;
  std::vector<InterlacedConfiguration> frames;

  bool operator==(const TrajectoryFile&) const = default;
};

// Runs the dynamics from the packed start and packages the result.
TrajectoryFile record_trajectory(unsigned n, unsigned long T, std::uint64_t seed);

// JSON, schema "tiling/1": order, provenance, and one {a, b, orientation,
// type} object per domino in stored order.
std::string serialize(const DominoTiling& tiling, const Provenance& origin = {});

// JSON, schema "trajectory/1": generator id, seed, n, T, and the frames as
// arrays of lines.
std::string serialize(const TrajectoryFile& trajectory);

// JSON, schema "report/1": name, statistic, threshold, samples, pass,
// metadata, and provenance.
std::string serialize(const stats::StatReport& report, const Provenance& origin = {});

// Inverses of the serializers.  All three throw ParseError on malformed
// input; the tiling reader additionally rejects dominoes outside the declared
// diamond or typed inconsistently with the checkerboard colouring.
DominoTiling deserialize_tiling(const std::string& text);
TrajectoryFile deserialize_trajectory(const std::string& text);
stats::StatReport deserialize_report(const std::string& text);

// Provenance block of any serialized artifact.
Provenance provenance_of(const std::string& text);

struct RenderOptions {
  double cell = 16.0;      // pixels per lattice unit
  bool particles = false;  // dot on every south and east domino
};

// Standalone SVG document: one rectangle per domino, south and east dominoes
// shaded, the diamond outline drawn on top.  An empty tiling gives the bare
// outline.
std::string render_svg(const DominoTiling& tiling, const RenderOptions& options = {});

// Text rendering, rows top to bottom: each covered square shows its domino's
// type letter (N, S, E, W), uncovered in-diamond squares show '.', squares
// outside the diamond are blank.
std::string render_ascii(const DominoTiling& tiling);

}  // namespace aztec::io
