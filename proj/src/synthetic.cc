#include "foldtree/synthetic.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "foldtree/error.h"
#include "foldtree/random.h"

namespace foldtree {
namespace {

// Accumulates numeric rows column by column.
class Builder {
 public:
  explicit Builder(std::vector<std::string> names)
      : names_(std::move(names)), values_(names_.size()) {}

  void add(const std::vector<double>& row, int label) {
    for (std::size_t j = 0; j < row.size(); ++j) values_[j].push_back(row[j]);
    target_.push_back(label);
  }

  Dataset finish(std::vector<std::string> class_labels) {
    std::vector<Column> columns;
    for (auto& v : values_) columns.emplace_back(NumericColumn{std::move(v)});
    return Dataset(std::move(names_), std::move(columns), std::move(target_),
                   std::move(class_labels));
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::optional<double>>> values_;
  std::vector<int> target_;
};

// Row 0 is the bottom row. Each class owns three squares; only two
// edge-adjacent pairs share a class. The class means differ within every row
// and column strip, so single-variable entry is always possible.
constexpr int kThreeClassTile[3][3] = {{0, 1, 2}, {0, 2, 1}, {2, 0, 1}};

std::vector<std::string> numbered(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> digit_labels(int classes) {
  std::vector<std::string> out;
  for (int c = 0; c < classes; ++c) out.push_back(std::to_string(c));
  return out;
}

}  // namespace

Dataset gen_chessboard(int classes, int board, int per_square, bool rotated,
                       int noise_dims, std::uint64_t seed) {
  if (classes != 2 && classes != 3) throw UsageError("classes must be 2 or 3");
  if (board < 2) throw UsageError("board must be at least 2");
  if (per_square < 1) throw UsageError("per_square must be at least 1");
  if (noise_dims < 0) throw UsageError("noise_dims must be nonnegative");

  std::vector<std::string> names{"x1", "x2"};
  for (auto& n : numbered("noise", noise_dims)) names.push_back(n);
  Builder builder(std::move(names));
  Rng rng(seed);
  const double half = board / 2.0;
  const double c = std::cos(std::numbers::pi / 4);
  const double s = std::sin(std::numbers::pi / 4);
  std::vector<double> row(2 + noise_dims);
  for (int r = 0; r < board; ++r) {
    for (int col = 0; col < board; ++col) {
      const int label =
          classes == 2 ? (r + col) % 2 : kThreeClassTile[r % 3][col % 3];
      for (int i = 0; i < per_square; ++i) {
        double x = col + uniform01(rng);
        double y = r + uniform01(rng);
        if (rotated) {
          const double dx = x - half;
          const double dy = y - half;
          x = half + c * dx - s * dy;
          y = half + s * dx + c * dy;
        }
        row[0] = x;
        row[1] = y;
        for (int k = 0; k < noise_dims; ++k) row[2 + k] = standard_normal(rng);
        builder.add(row, label);
      }
    }
  }
  return builder.finish(digit_labels(classes));
}

Dataset gen_xor6d(int per_center, double sd, std::uint64_t seed) {
  if (per_center < 1) throw UsageError("per_center must be at least 1");
  if (!(sd >= 0.0)) throw UsageError("sd must be nonnegative");
  Builder builder(numbered("x", 6));
  Rng rng(seed);
  std::vector<double> row(6);
  for (int corner = 0; corner < 64; ++corner) {
    int parity = 0;
    for (int k = 0; k < 6; ++k) parity ^= (corner >> k) & 1;
    for (int i = 0; i < per_center; ++i) {
      for (int k = 0; k < 6; ++k) {
        row[k] = ((corner >> k) & 1) + sd * standard_normal(rng);
      }
      builder.add(row, parity);
    }
  }
  return builder.finish(digit_labels(2));
}

double xor6d_bayes_accuracy(double sd) {
  if (sd <= 0.0) return 1.0;
  // Per-coordinate flip probability: the draw crosses the midpoint 0.5.
  const double e = 0.5 * std::erfc((0.5 / sd) / std::numbers::sqrt2);
  return 0.5 * (1.0 + std::pow(1.0 - 2.0 * e, 6));
}

Dataset gen_dominant_class(int n_a, int n_b, std::uint64_t seed) {
  if (n_a < 1 || n_b < 1) throw UsageError("class sizes must be at least 1");
  Builder builder({"x1", "x2"});
  Rng rng(seed);
  // Every 7th A point goes to the satellite (about 14% of A).
  for (int i = 0; i < n_a; ++i) {
    const double centre = i % 7 == 6 ? -4.0 : 0.0;
    builder.add({standard_normal(rng), centre + 0.3 * standard_normal(rng)}, 0);
  }
  for (int i = 0; i < n_b; ++i) {
    builder.add({standard_normal(rng), 1.2 + 0.1 * standard_normal(rng)}, 1);
  }
  return builder.finish({"A", "B"});
}

Dataset gen_split_strength_demo(int extra_noise, std::uint64_t seed) {
  if (extra_noise < 0) throw UsageError("extra_noise must be nonnegative");
  Builder builder({"x1", "x2"});
  Rng rng(seed);
  const int noise = 100 + extra_noise;
  for (int i = 0; i < noise; ++i) {
    builder.add({uniform(rng, -1.0, 0.0), uniform(rng, -1.0, 1.0)}, i % 2);
  }
  for (int i = 0; i < 100; ++i) {
    const int label = i % 2;
    const double x2 = label == 0 ? uniform(rng, 0.05, 1.0)
                                 : uniform(rng, -1.0, -0.05);
    builder.add({uniform(rng, 0.0, 1.0) + 1e-9, x2}, label);
  }
  return builder.finish({"A", "B"});
}

const char* synthetic_kind_name(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kChessboard3x3:
      return "chessboard3x3";
    case SyntheticKind::kRotatedChessboard:
      return "rotated_chessboard";
    case SyntheticKind::kChessboardNoise:
      return "chessboard_noise";
    case SyntheticKind::kXor6d:
      return "xor6d";
    case SyntheticKind::kDominantClass:
      return "dominant_class";
    case SyntheticKind::kSplitStrengthDemo:
      return "split_strength_demo";
  }
  return "chessboard3x3";
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
  for (auto kind :
       {SyntheticKind::kChessboard3x3, SyntheticKind::kRotatedChessboard,
        SyntheticKind::kChessboardNoise, SyntheticKind::kXor6d,
        SyntheticKind::kDominantClass, SyntheticKind::kSplitStrengthDemo}) {
    if (name == synthetic_kind_name(kind)) return kind;
  }
  throw UsageError("unknown dataset spec '" + name + "'");
}

SyntheticSpec SyntheticSpec::defaults(SyntheticKind kind, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  if (kind == SyntheticKind::kRotatedChessboard) {
    spec.classes = 2;
  }
  return spec;
}

Dataset generate(const SyntheticSpec& spec) {
  switch (spec.kind) {
    case SyntheticKind::kChessboard3x3:
      return gen_chessboard(spec.classes, spec.board, spec.per_square, false, 0,
                            spec.seed);
    case SyntheticKind::kRotatedChessboard:
      return gen_chessboard(spec.classes, spec.board, spec.per_square, true, 0,
                            spec.seed);
    case SyntheticKind::kChessboardNoise:
      return gen_chessboard(spec.classes, spec.board, spec.per_square, false,
                            spec.noise_dims, spec.seed);
    case SyntheticKind::kXor6d:
      return gen_xor6d(spec.per_center, spec.sd, spec.seed);
    case SyntheticKind::kDominantClass:
      return gen_dominant_class(spec.n_a, spec.n_b, spec.seed);
    case SyntheticKind::kSplitStrengthDemo:
      return gen_split_strength_demo(spec.extra_noise, spec.seed);
  }
  throw UsageError("unknown dataset spec");
}

}  // namespace foldtree
