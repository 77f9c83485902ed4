#include "aztec/shuffling.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace aztec {
namespace {

// Distance scale of the diamond: the square column a fits inside the order-n
// diamond iff reach(a) + reach(b) <= n+1.
long reach(long c) { return c >= 0 ? c + 1 : -c; }

bool even(long v) { return (v & 1) == 0; }

std::pair<std::pair<long, long>, std::pair<long, long>> squares_of(const Domino& d) {
  if (d.orientation == Orientation::kHorizontal) {
    return {{d.a, d.b}, {d.a + 1, d.b}};
  }
  return {{d.a, d.b}, {d.a, d.b + 1}};
}

void canonicalize(DominoTiling& tiling) { std::sort(tiling.dominoes.begin(), tiling.dominoes.end()); }

[[noreturn]] void fault(const std::string& what) { throw std::logic_error(what); }

}  // namespace

bool square_in_diamond(long a, long b, unsigned order) {
  return reach(a) + reach(b) <= static_cast<long>(order) + 1;
}

bool domino_in_diamond(const Domino& d, unsigned order) {
  auto [first, second] = squares_of(d);
  return square_in_diamond(first.first, first.second, order) &&
         square_in_diamond(second.first, second.second, order);
}

bool black_square(long a, long b, unsigned order) {
  if (!square_in_diamond(a, b, order)) {
    throw std::invalid_argument("black_square: square outside the diamond");
  }
  return even(a + b + static_cast<long>(order));
}

DominoType classify(const Domino& d, unsigned order) {
  const long n = static_cast<long>(order);
  if (d.orientation == Orientation::kHorizontal) {
    return even(d.a + d.b + n) ? DominoType::kNorth : DominoType::kSouth;
  }
  return even(d.a + d.b + 1 + n) ? DominoType::kWest : DominoType::kEast;
}

char type_letter(DominoType type) {
  switch (type) {
    case DominoType::kNorth: return 'N';
    case DominoType::kSouth: return 'S';
    case DominoType::kEast: return 'E';
    case DominoType::kWest: return 'W';
  }
  fault("type_letter: bad enum");
}

bool exact_cover(const DominoTiling& tiling) {
  const unsigned long n = tiling.order;
  if (tiling.dominoes.size() != static_cast<size_t>(n) * (n + 1)) return false;
  std::set<std::pair<long, long>> covered;
  for (const Domino& d : tiling.dominoes) {
    auto [first, second] = squares_of(d);
    for (const auto& sq : {first, second}) {
      if (!square_in_diamond(sq.first, sq.second, tiling.order)) return false;
      if (!covered.insert(sq).second) return false;
    }
  }
  return covered.size() == 2 * static_cast<size_t>(n) * (n + 1);
}

DominoTiling destruction(const DominoTiling& tiling) {
  std::set<std::pair<long, long>> horizontal;
  std::set<std::pair<long, long>> vertical;
  for (const Domino& d : tiling.dominoes) {
    (d.orientation == Orientation::kHorizontal ? horizontal : vertical).insert({d.a, d.b});
  }
  // A north partner below a south (or a west right of an east) has the
  // complementary colour automatically, so presence of any domino of the same
  // orientation at the partner anchor identifies a colliding pair.
  DominoTiling out;
  out.order = tiling.order;
  for (const Domino& d : tiling.dominoes) {
    bool removed = false;
    switch (classify(d, tiling.order)) {
      case DominoType::kNorth: removed = horizontal.contains({d.a, d.b + 1}); break;
      case DominoType::kSouth: removed = horizontal.contains({d.a, d.b - 1}); break;
      case DominoType::kWest: removed = vertical.contains({d.a - 1, d.b}); break;
      case DominoType::kEast: removed = vertical.contains({d.a + 1, d.b}); break;
    }
    if (!removed) out.dominoes.push_back(d);
  }
  return out;
}

DominoTiling shuffle_move(const DominoTiling& partial) {
  DominoTiling out;
  out.order = partial.order + 1;
  out.dominoes.reserve(partial.dominoes.size());
  for (const Domino& d : partial.dominoes) {
    Domino moved = d;
    switch (classify(d, partial.order)) {
      case DominoType::kNorth: ++moved.b; break;
      case DominoType::kSouth: --moved.b; break;
      case DominoType::kWest: --moved.a; break;
      case DominoType::kEast: ++moved.a; break;
    }
    out.dominoes.push_back(moved);
  }
  canonicalize(out);
  std::set<std::pair<long, long>> covered;
  for (const Domino& d : out.dominoes) {
    if (!domino_in_diamond(d, out.order)) fault("shuffle_move: domino left the diamond");
    auto [first, second] = squares_of(d);
    if (!covered.insert(first).second || !covered.insert(second).second) {
      fault("shuffle_move: overlap after moving");
    }
  }
  return out;
}

std::vector<std::pair<long, long>> creation_blocks(const DominoTiling& partial) {
  std::set<std::pair<long, long>> covered;
  for (const Domino& d : partial.dominoes) {
    auto [first, second] = squares_of(d);
    covered.insert(first);
    covered.insert(second);
  }
  const long n = partial.order;
  std::vector<std::pair<long, long>> anchors;
  for (long b = n - 1; b >= -n; --b) {
    const long m = n + 1 - reach(b);
    for (long a = -m; a < m; ++a) {
      if (covered.contains({a, b})) continue;
      // First uncovered square of the scan is the top-left corner of its 2x2
      // block, so the block anchor sits one row below.
      if (!even(a + b + n)) fault("creation_blocks: block corner on wrong colour");
      for (const auto& sq :
           {std::pair<long, long>{a + 1, b}, {a, b - 1}, {a + 1, b - 1}}) {
        if (!square_in_diamond(sq.first, sq.second, partial.order) || covered.contains(sq)) {
          fault("creation_blocks: empty region not partitioned into blocks");
        }
      }
      anchors.emplace_back(a, b - 1);
      covered.insert({a, b});
      covered.insert({a + 1, b});
      covered.insert({a, b - 1});
      covered.insert({a + 1, b - 1});
    }
  }
  return anchors;
}

DominoTiling fill_blocks(DominoTiling partial, std::span<const std::pair<long, long>> blocks,
                         std::span<const int> bits) {
  if (blocks.size() != bits.size()) {
    throw std::invalid_argument("fill_blocks: one bit per block required");
  }
  for (size_t k = 0; k < blocks.size(); ++k) {
    const auto [a, b] = blocks[k];
    if (bits[k]) {
      partial.dominoes.push_back({a, b, Orientation::kVertical});
      partial.dominoes.push_back({a + 1, b, Orientation::kVertical});
    } else {
      partial.dominoes.push_back({a, b, Orientation::kHorizontal});
      partial.dominoes.push_back({a, b + 1, Orientation::kHorizontal});
    }
  }
  canonicalize(partial);
  if (!exact_cover(partial)) fault("fill_blocks: result is not an exact cover");
  return partial;
}

DominoTiling creation(const DominoTiling& partial, BitStream& coins) {
  const auto blocks = creation_blocks(partial);
  std::vector<int> bits(blocks.size());
  for (int& bit : bits) bit = coins.next_bit();
  return fill_blocks(partial, blocks, bits);
}

namespace {

// Flat double-buffered byte grid for large-order growth.  Cells hold which
// half of which domino covers them; only the anchor cells (kHorizLeft,
// kVertBottom) drive the moves.
enum : std::uint8_t { kEmpty = 0, kHorizLeft, kHorizRight, kVertBottom, kVertTop };

constexpr std::uint64_t kLaneOnes = 0x0101010101010101ull;      // 0x01 in every byte
constexpr std::uint64_t kEvenLanes = 0x0001000100010001ull;     // 0x01 in bytes 0,2,4,6
constexpr std::uint64_t kOddLanes = kEvenLanes << 8;
constexpr std::uint64_t kLaneHighBits = 0x8080808080808080ull;  // 0x80 in every byte

class ShuffleGrid {
 public:
  explicit ShuffleGrid(unsigned capacity)
      : cap_(static_cast<long>(capacity) + 1),
        side_((2 * cap_ + 7) & ~7l),  // row stride rounded up to whole words
        words_(side_ / 8),
        cur_(static_cast<size_t>(side_) * static_cast<size_t>(side_), 0),
        nxt_(cur_) {
    for (auto& arr : row_masks_) arr.assign(static_cast<size_t>(words_) + 4, 0);
    for (auto& arr : row_acc_) arr.assign(static_cast<size_t>(words_) + 4, 0);
  }

  // One destruction/shuffle/creation round taking the held order-t tiling to
  // order t+1.  The move pass works on eight cells per 64-bit word with no
  // data-dependent branching (per-cell branches on a random tiling defeat the
  // branch predictor and dominate the runtime); the creation scan skips fully
  // covered stretches eight cells at a time.  The sequence of filled blocks,
  // and hence the coin stream consumption, is identical to filling the blocks
  // row by row from the top, left to right.
  void advance(unsigned t, BitStream& coins) {
    const long n0 = t;
    const long n1 = n0 + 1;
    const std::ptrdiff_t stride = side_;
    // Clear each destination row across the new diamond width plus a one-cell
    // margin; the margin keeps the edge reads below well defined.
    for (long b = -n1; b < n1; ++b) {
      const long m1 = n1 + 1 - reach(b);
      std::fill(cell(nxt_, -m1 - 1, b), cell(nxt_, m1 + 1, b), std::uint8_t{kEmpty});
    }
    if (n0 >= 1) move_pass(n0);
    // Creation pass: the uncovered area splits into two-by-two blocks; each
    // block takes a fresh coin and becomes a horizontal or vertical pair.
    for (long b = n1 - 1; b >= -n1; --b) {
      const long m = n1 + 1 - reach(b);
      const long m_below = n1 + 1 - reach(b - 1);
      std::uint8_t* const row0 = cell(nxt_, -m, b);
      const long len = 2 * m;
      long i = 0;
      while (i < len) {
        if (i + 8 <= len) {
          std::uint64_t w;
          std::memcpy(&w, row0 + i, 8);
          const std::uint64_t holes =
              (w - 0x0101010101010101ull) & ~w & 0x8080808080808080ull;
          if (holes == 0) {
            i += 8;
            continue;
          }
          i += std::countr_zero(holes) >> 3;  // lowest marker bit is exact
        } else if (row0[i] != kEmpty) {
          ++i;
          continue;
        }
        const long a = -m + i;
        std::uint8_t* const p = row0 + i;
        if (!even(a + b + n1)) fault("grow: block corner on wrong colour");
        if (p[1] != kEmpty || p[stride] != kEmpty || p[stride + 1] != kEmpty ||
            a < -m_below || a >= m_below || a + 1 >= m) {
          fault("grow: empty region not partitioned into blocks");
        }
        if (coins.next_bit()) {
          p[stride] = kVertBottom;
          p[0] = kVertTop;
          p[stride + 1] = kVertBottom;
          p[1] = kVertTop;
        } else {
          p[stride] = kHorizLeft;
          p[stride + 1] = kHorizRight;
          p[0] = kHorizLeft;
          p[1] = kHorizRight;
        }
        i += 2;  // the block also covered the cell to the right
      }
    }
    cur_.swap(nxt_);
  }

  DominoTiling harvest(unsigned order) const {
    DominoTiling out;
    out.order = order;
    const long n = order;
    out.dominoes.reserve(static_cast<size_t>(n) * (n + 1));
    for (long b = n - 1; b >= -n; --b) {
      const long m = n + 1 - reach(b);
      const std::uint8_t* row = cell(cur_, -m, b);
      for (long a = -m; a < m; ++a, ++row) {
        if (*row == kHorizLeft) out.dominoes.push_back({a, b, Orientation::kHorizontal});
        if (*row == kVertBottom) out.dominoes.push_back({a, b, Orientation::kVertical});
      }
    }
    canonicalize(out);
    if (!exact_cover(out)) fault("grow: harvested tiling is not an exact cover");
    return out;
  }

 private:
  std::uint8_t* cell(std::vector<std::uint8_t>& grid, long a, long b) const {
    return grid.data() + static_cast<size_t>(cap_ - 1 - b) * static_cast<size_t>(side_) +
           static_cast<size_t>(a + cap_);
  }
  const std::uint8_t* cell(const std::vector<std::uint8_t>& grid, long a, long b) const {
    return grid.data() + static_cast<size_t>(cap_ - 1 - b) * static_cast<size_t>(side_) +
           static_cast<size_t>(a + cap_);
  }

  // Build anchor masks for one cur_ row over words [klo-1, khi+1]: hl gets a
  // 0x01 lane wherever the byte is kHorizLeft, vb wherever it is kVertBottom
  // (the only odd cell values).  The extra zeroed word on each side keeps
  // neighbour-word reads below well defined.
  void mask_row(long b, long klo, long khi, std::uint64_t* hl, std::uint64_t* vb) const {
    const std::uint8_t* const row =
        cur_.data() + static_cast<size_t>(cap_ - 1 - b) * static_cast<size_t>(side_);
    hl[klo - 1] = vb[klo - 1] = 0;
    hl[khi + 1] = vb[khi + 1] = 0;
    for (long k = klo; k <= khi; ++k) {
      std::uint64_t w;
      __builtin_memcpy(&w, row + 8 * k, 8);
      const std::uint64_t anchors = w & kLaneOnes;
      const std::uint64_t vert = (w >> 1) & anchors;
      vb[k] = vert;
      hl[k] = anchors ^ vert;
    }
  }

  // Word-parallel move pass: every domino slides one step in the direction
  // its anchor colour dictates, except when it would swap places with an
  // oncoming domino, in which case both stay behind (the destruction step).
  // Each destination row is assembled in a 64-bit accumulator array and
  // stored once all three source rows feeding it have been processed.
  void move_pass(long n0) {
    std::uint64_t* hlA = row_masks_[0].data() + 1;  // row b+1 (above)
    std::uint64_t* vbA = row_masks_[1].data() + 1;
    std::uint64_t* hlC = row_masks_[2].data() + 1;  // row b (current)
    std::uint64_t* vbC = row_masks_[3].data() + 1;
    std::uint64_t* hlD = row_masks_[4].data() + 1;  // row b-1 (below)
    std::uint64_t* vbD = row_masks_[5].data() + 1;
    std::uint64_t* accU = row_acc_[0].data() + 1;   // nxt_ row b+1
    std::uint64_t* accM = row_acc_[1].data() + 1;   // nxt_ row b
    std::uint64_t* accD = row_acc_[2].data() + 1;   // nxt_ row b-1

    long b = n0 - 1;
    long m = n0 + 1 - reach(b);
    long klo = (cap_ - m - 1) >> 3;
    long khi = (cap_ + m) >> 3;
    // Row n0 sits above the top source row and holds no dominoes; its mask
    // pass reads never-written bytes and yields zeros.
    mask_row(b + 1, klo, khi, hlA, vbA);
    mask_row(b, klo, khi, hlC, vbC);

    for (; b >= -n0; --b) {
      m = n0 + 1 - reach(b);
      klo = (cap_ - m - 1) >> 3;
      khi = (cap_ + m) >> 3;
      if (b - 1 >= -n0) {
        const long mD = n0 + 1 - reach(b - 1);
        mask_row(b - 1, (cap_ - mD - 1) >> 3, (cap_ + mD) >> 3, hlD, vbD);
      } else {
        std::fill(hlD + klo - 1, hlD + khi + 2, 0ull);
        std::fill(vbD + klo - 1, vbD + khi + 2, 0ull);
      }

      const std::uint64_t evens = ((b + n0 + cap_) & 1) ? kOddLanes : kEvenLanes;
      const std::uint64_t odds = evens ^ kLaneOnes;

      for (long k = klo; k <= khi; ++k) {
        const std::uint64_t hl = hlC[k], vb = vbC[k];
        // Horizontal movers: up on even colour, down on odd; blocked when the
        // target row holds an oncoming left half in the same lane.
        const std::uint64_t hl_up = hl & evens & ~hlA[k];
        const std::uint64_t hl_dn = hl & odds & ~hlD[k];
        // Vertical movers: left on odd colour, right on even; blocked when
        // the adjacent lane of this row holds an oncoming bottom half.
        const std::uint64_t vb_lf = vb & odds & ~((vb << 8) | (vbC[k - 1] >> 56));
        const std::uint64_t vb_rt = vb & evens & ~((vb >> 8) | (vbC[k + 1] << 56));

        // Vertical targets shifted one lane left/right; lane 0 spills into
        // the previous word's top lane, lane 7 into the next word's lane 0.
        const std::uint64_t vmask = (vb_lf >> 8) | (vb_rt << 8);
        const std::uint64_t spill_lf = vb_lf << 56;  // 0x01 in lane 7, or zero
        const std::uint64_t spill_rt = vb_rt >> 56;  // 0x01 in lane 0, or zero

        // Horizontal pair bytes: left half (1) in the mover lane, right half
        // (2) one lane later; a lane-7 mover spills its right half forward.
        const std::uint64_t up_bytes = hl_up | (hl_up << 9);
        const std::uint64_t up_spill = (hl_up >> 55) & 2;
        const std::uint64_t dn_bytes = hl_dn | (hl_dn << 9);
        const std::uint64_t dn_spill = (hl_dn >> 55) & 2;

        // Vertical pair bytes: bottom (3) in this row, top (4) one row up.
        accU[k] |= up_bytes | (vmask << 2);
        accM[k] |= vmask | (vmask << 1);
        accD[k] |= dn_bytes;
        accU[k + 1] |= up_spill | (spill_rt << 2);
        accM[k + 1] |= spill_rt | (spill_rt << 1);
        accD[k + 1] |= dn_spill;
        accU[k - 1] |= spill_lf << 2;
        accM[k - 1] |= spill_lf | (spill_lf << 1);
      }

      // Row b+1 has now received every contribution: store it into nxt_ and
      // reset the accumulator for reuse two rows further down.
      flush_row(b + 1, klo, khi, accU);

      std::uint64_t* tmp;
      tmp = hlA; hlA = hlC; hlC = hlD; hlD = tmp;
      tmp = vbA; vbA = vbC; vbC = vbD; vbD = tmp;
      tmp = accU; accU = accM; accM = accD; accD = tmp;
    }

    // The loop flushed rows down to -n0+1; rows -n0 and -n0-1 remain.
    flush_row(-n0, klo, khi, accU);
    flush_row(-n0 - 1, klo, khi, accM);
  }

  void flush_row(long row, long klo, long khi, std::uint64_t* acc) {
    const long flo = klo >= 2 ? klo - 2 : 0;
    const long fhi = khi + 2 <= words_ - 1 ? khi + 2 : words_ - 1;
    std::uint8_t* const out =
        nxt_.data() + static_cast<size_t>(cap_ - 1 - row) * static_cast<size_t>(side_);
    for (long k = flo; k <= fhi; ++k) {
      __builtin_memcpy(out + 8 * k, &acc[k], 8);
      acc[k] = 0;
    }
  }

  long cap_;
  long side_;
  long words_;
  std::vector<std::uint8_t> cur_;
  std::vector<std::uint8_t> nxt_;
  std::vector<std::uint64_t> row_masks_[6];
  std::vector<std::uint64_t> row_acc_[3];
};

}  // namespace

DominoTiling grow(unsigned order, std::uint64_t seed) {
  if (order == 0) return {};
  ShuffleGrid grid(order);
  BitStream coins(seed);
  for (unsigned t = 0; t < order; ++t) grid.advance(t, coins);
  return grid.harvest(order);
}

std::vector<std::pair<DominoTiling, Rational>> enumerate_all(unsigned order) {
  if (order > 4) {
    throw std::invalid_argument("enumerate_all: coin tree too large beyond order 4");
  }
  std::map<DominoTiling, Rational> law;
  auto recurse = [&](auto&& self, const DominoTiling& cur, const Rational& prob) -> void {
    if (cur.order == order) {
      law[cur] += prob;
      return;
    }
    const DominoTiling partial = shuffle_move(destruction(cur));
    const auto blocks = creation_blocks(partial);
    const Rational child_prob = prob * rat(1, long(1) << blocks.size());
    std::vector<int> bits(blocks.size());
    for (unsigned long mask = 0; mask < (1ul << blocks.size()); ++mask) {
      for (size_t k = 0; k < blocks.size(); ++k) bits[k] = (mask >> k) & 1;
      self(self, fill_blocks(partial, blocks, bits), child_prob);
    }
  };
  recurse(recurse, DominoTiling{}, rat(1));
  return {law.begin(), law.end()};
}

InterlacedConfiguration extract_particles(const DominoTiling& tiling) {
  const long t = tiling.order;
  InterlacedConfiguration cfg;
  cfg.lines.resize(tiling.order);
  for (const Domino& d : tiling.dominoes) {
    const DominoType type = classify(d, tiling.order);
    long line_twice = 0;
    long offset = 0;
    if (type == DominoType::kSouth) {
      line_twice = t + 1 - d.b + d.a;
      offset = 2;
    } else if (type == DominoType::kEast) {
      line_twice = t - d.b + d.a;
      offset = 1;
    } else {
      continue;
    }
    if (!even(line_twice)) fault("extract_particles: particle between lines");
    const long j = line_twice / 2;
    const long x = d.a + t - j + offset;
    if (j < 1 || j > t || x < 1 || x > t) fault("extract_particles: particle outside its range");
    cfg.lines[static_cast<size_t>(j) - 1].push_back(x);
  }
  for (size_t k = 0; k < cfg.lines.size(); ++k) {
    auto& line = cfg.lines[k];
    std::sort(line.begin(), line.end());
    if (line.size() != k + 1) fault("extract_particles: wrong particle count on a line");
    if (k == 0) continue;
    const auto& upper = cfg.lines[k - 1];
    for (size_t i = 0; i + 1 < line.size(); ++i) {
      if (line[i] > upper[i] || upper[i] > line[i + 1]) {
        fault("extract_particles: lines fail to interlace");
      }
    }
  }
  return cfg;
}

std::map<InterlacedConfiguration, Rational> enumerate_growth(unsigned lines, unsigned steps) {
  if (lines < 1) throw std::invalid_argument("enumerate_growth: need at least one line");
  if (lines + steps > 5) {
    throw std::invalid_argument("enumerate_growth: coin tree too large beyond order 5");
  }
  const unsigned target = lines + steps;
  std::map<InterlacedConfiguration, Rational> law;
  auto recurse = [&](auto&& self, const DominoTiling& cur, InterlacedConfiguration slice,
                     const Rational& prob) -> void {
    if (cur.order > steps && cur.order - steps <= lines) {
      const auto extracted = extract_particles(cur);
      slice.lines.push_back(extracted.lines[cur.order - steps - 1]);
    }
    if (cur.order == target) {
      law[slice] += prob;
      return;
    }
    const DominoTiling partial = shuffle_move(destruction(cur));
    const auto blocks = creation_blocks(partial);
    const Rational child_prob = prob * rat(1, long(1) << blocks.size());
    std::vector<int> bits(blocks.size());
    for (unsigned long mask = 0; mask < (1ul << blocks.size()); ++mask) {
      for (size_t k = 0; k < blocks.size(); ++k) bits[k] = (mask >> k) & 1;
      self(self, fill_blocks(partial, blocks, bits), slice, child_prob);
    }
  };
  recurse(recurse, DominoTiling{}, InterlacedConfiguration{}, rat(1));
  return law;
}

CoupledRun coupled_run(unsigned lines, unsigned steps, std::uint64_t seed) {
  if (lines < 1) throw std::invalid_argument("coupled_run: need at least one line");
  const CoinField field{seed};
  CoupledRun out;
  out.dynamics_track = simulate(lines, steps, seed, UpdateRule::kPostUpdate);

  const unsigned target = lines + steps;
  std::vector<InterlacedConfiguration> extracted(target + 1);
  DominoTiling cur;
  for (unsigned s = 1; s <= target; ++s) {
    const DominoTiling partial = shuffle_move(destruction(cur));
    const auto blocks = creation_blocks(partial);
    // Particle positions at order s do not depend on how the blocks are
    // filled, so a provisional fill pins down every birth rank before any
    // routed coin is consumed.
    const std::vector<int> flat(blocks.size(), 0);
    const auto positions = extract_particles(fill_blocks(partial, blocks, flat));
    std::vector<int> bits(blocks.size());
    for (size_t k = 0; k < blocks.size(); ++k) {
      const auto [a, b] = blocks[k];
      const long line_twice = static_cast<long>(s) + 1 - b + a;
      if (!even(line_twice)) fault("coupled_run: block particle between lines");
      const long j = line_twice / 2;
      if (j < 1 || j > static_cast<long>(s)) fault("coupled_run: block particle off the lines");
      const long x = a + static_cast<long>(s) - j + 2;
      const auto& line = positions.lines[static_cast<size_t>(j) - 1];
      const auto it = std::lower_bound(line.begin(), line.end(), x);
      if (it == line.end() || *it != x) fault("coupled_run: birth position missing from its line");
      const unsigned rank = static_cast<unsigned>(it - line.begin()) + 1;
      bits[k] = field.bit(static_cast<unsigned>(j), rank, s - static_cast<unsigned long>(j) + 1);
    }
    cur = fill_blocks(partial, blocks, bits);
    extracted[s] = extract_particles(cur);
  }

  out.shuffle_track.resize(steps + 1);
  for (unsigned t = 0; t <= steps; ++t) {
    auto& slice = out.shuffle_track[t];
    slice.lines.resize(lines);
    for (unsigned j = 1; j <= lines; ++j) {
      slice.lines[j - 1] = extracted[t + j].lines[j - 1];
    }
  }
  return out;
}

}  // namespace aztec
