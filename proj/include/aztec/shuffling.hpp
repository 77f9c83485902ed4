#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "aztec/dynamics.hpp"
#include "aztec/rational.hpp"
#include "aztec/rng.hpp"

namespace aztec {

// Domino-level model of the Aztec diamond.  The diamond of order n is the set
// of unit lattice squares [a,a+1]x[b,b+1] contained in {|x|+|y| <= n+1}; a
// square is named by its lower-left corner (a,b).  A domino covers two
// adjacent squares and is named by its lower-left square and orientation.

enum class Orientation { kHorizontal, kVertical };

// Horizontal dominoes are north or south, vertical ones west or east,
// depending on the checkerboard colour of their leftmost (resp. topmost)
// square.  North moves up under shuffling, south down, west left, east right.
// South and east dominoes carry the particles.
enum class DominoType { kNorth, kSouth, kEast, kWest };

struct Domino {
  long a = 0;
  long b = 0;
  Orientation orientation = Orientation::kHorizontal;

  auto operator<=>(const Domino&) const = default;
};

struct DominoTiling {
  unsigned order = 0;
  std::vector<Domino> dominoes;  // sorted by (a, b, orientation)

  auto operator<=>(const DominoTiling&) const = default;
};

// True if the square with lower-left corner (a,b) lies inside the order-n
// diamond.
bool square_in_diamond(long a, long b, unsigned order);

// True if both squares of the domino lie inside the order-n diamond.
bool domino_in_diamond(const Domino& d, unsigned order);

// Checkerboard colour normalized so the left square of the top row is black.
// Throws std::invalid_argument for squares outside the diamond.
bool black_square(long a, long b, unsigned order);

// N/S/E/W classification of a domino relative to the order-n colouring.
DominoType classify(const Domino& d, unsigned order);

char type_letter(DominoType type);

// True if the tiling covers every square of its diamond exactly once with
// order*(order+1) dominoes.
bool exact_cover(const DominoTiling& tiling);

// Removes every colliding pair: a south domino directly on top of a north
// domino, or an east domino directly to the left of a west domino.  Such
// pairs would swap places under shuffling; everything else is untouched.
DominoTiling destruction(const DominoTiling& tiling);

// Moves every surviving domino one unit in its travel direction and bumps the
// order.  Expects destruction to have been applied; a detected overlap or a
// square leaving the diamond throws std::logic_error.
DominoTiling shuffle_move(const DominoTiling& partial);

// Anchors (lower-left corners) of the empty 2x2 blocks of a shuffled partial
// tiling, in the order the creation scan visits them: rows top to bottom,
// left to right.
std::vector<std::pair<long, long>> creation_blocks(const DominoTiling& partial);

// Fills the given blocks, one bit each: 0 places two horizontal dominoes,
// 1 two vertical ones.  The result must be an exact cover.
DominoTiling fill_blocks(DominoTiling partial, std::span<const std::pair<long, long>> blocks,
                         std::span<const int> bits);

// Destruction-shuffle-creation round with coins drawn from the stream in scan
// order.
DominoTiling creation(const DominoTiling& partial, BitStream& coins);

// Grows a uniformly random tiling of the order-n diamond from the empty
// tiling, one shuffling round per order.  Runs on flat byte grids; the result
// matches the value-level operations bit for bit.
DominoTiling grow(unsigned order, std::uint64_t seed);

// Expands every creation-coin sequence symbolically and returns each distinct
// tiling with its exact probability (2^-{n(n+1)/2} for every tiling).  Only
// sensible for order <= 4.
std::vector<std::pair<DominoTiling, Rational>> enumerate_all(unsigned order);

// Particle positions of a tiling: line j (counted from the top of the
// diamond, 1-based) carries exactly j particles, one per south or east
// domino.  Lines of a single tiling interlace weakly on both sides; the
// sharper staircase constraint of InterlacedConfiguration::valid applies to
// the time slices assembled by coupled_run, not to raw tilings.
InterlacedConfiguration extract_particles(const DominoTiling& tiling);

// Exact law of the particle time slice after `steps` rounds, restricted to
// the top `lines` lines: line j is read from the order-(steps+j) tiling.
// Exhaustive over coin sequences; requires lines + steps <= 5.
std::map<InterlacedConfiguration, Rational> enumerate_growth(unsigned lines, unsigned steps);

// One growth process and one particle-dynamics process driven by the same
// coin field: the bit of the creation block whose particle is born on line j
// with rank i at round s is the dynamics coin (j, i, s-j+1).  The two tracks
// coincide frame for frame.
struct CoupledRun {
  std::vector<InterlacedConfiguration> shuffle_track;
  std::vector<InterlacedConfiguration> dynamics_track;
};

CoupledRun coupled_run(unsigned lines, unsigned steps, std::uint64_t seed);

}  // namespace aztec
