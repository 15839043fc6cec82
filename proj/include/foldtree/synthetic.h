#ifndef FOLDTREE_SYNTHETIC_H_
#define FOLDTREE_SYNTHETIC_H_

#include <cstdint>
#include <string>

#include "foldtree/dataset.h"

namespace foldtree {

// Checkerboard of board x board unit squares with `per_square` uniform
// points each. Two classes alternate as on a chess board. Three classes
// repeat a fixed 3x3 tile (rows bottom to top: 012, 021, 201), so a 3x3
// board gives each class three squares. `rotated` turns the board 45 degrees
// about its center. `noise_dims` N(0, 1) columns are appended. Columns are
// x1, x2, then noise1, noise2, ...
Dataset gen_chessboard(int classes, int board, int per_square, bool rotated,
                       int noise_dims, std::uint64_t seed);

// 64 corners of the unit 6-cube, labeled by coordinate parity, with
// `per_center` draws of N(corner, sd^2 I) each.
Dataset gen_xor6d(int per_center, double sd, std::uint64_t seed);

// Bayes accuracy of gen_xor6d: a draw is misclassified when an odd number of
// its coordinates lands nearer the opposite corner value.
double xor6d_bayes_accuracy(double sd);

// Two classes in 2-D where class A (label "A") outnumbers class B ("B").
// Class A is a main cluster plus a far satellite below it; class B is a
// tight cluster just above the main cluster. The satellite inflates the
// pooled variance, so estimated-prior LDA assigns everything to A while an
// equal-prior fit cuts between the main cluster and B.
Dataset gen_dominant_class(int n_a, int n_b, std::uint64_t seed);

// Two classes, 100 each. Half of each class is uniform noise over
// x1 <= 0; the other half sits in x1 > 0, class A above x2 = 0 and class B
// below it. `extra_noise` more noise points (alternating classes) join the
// x1 <= 0 block.
Dataset gen_split_strength_demo(int extra_noise, std::uint64_t seed);

enum class SyntheticKind {
  kChessboard3x3,
  kRotatedChessboard,
  kChessboardNoise,
  kXor6d,
  kDominantClass,
  kSplitStrengthDemo,
};

const char* synthetic_kind_name(SyntheticKind kind);
// Throws UsageError on an unknown name.
SyntheticKind parse_synthetic_kind(const std::string& name);

// Generator parameters. Fields that a kind does not use are ignored.
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kChessboard3x3;
  std::uint64_t seed = 1;
  int classes = 3;
  int board = 3;
  int per_square = 2000;
  int noise_dims = 100;
  int per_center = 100;
  double sd = 0.2;
  int n_a = 809;
  int n_b = 191;
  int extra_noise = 0;

  // Defaults for a kind. The rotated board is a two-class layout.
  static SyntheticSpec defaults(SyntheticKind kind, std::uint64_t seed);
};

// Pure function of the spec.
Dataset generate(const SyntheticSpec& spec);

}  // namespace foldtree

#endif  // FOLDTREE_SYNTHETIC_H_
