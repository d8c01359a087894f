#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "tsad/core.hpp"
#include "tsad/execution.hpp"
#include "tsad/rng.hpp"

namespace tsad::rrcf {

/// Robust random cut tree over points of fixed dimension. Points are streamed in
/// with a caller-chosen integer index and removed by that index. Exact
/// duplicates share one leaf whose multiplicity counts them.
class RcTree {
 public:
  static constexpr int kNone = -1;

  struct Node {
    int parent = kNone;
    int left = kNone;   // branch only
    int right = kNone;  // branch only
    std::size_t cut_dim = 0;
    double cut = 0.0;
    std::size_t count = 0;  // leaf multiplicity, or total multiplicity below a branch
    bool leaf = false;
    std::vector<std::size_t> indices;  // leaf only
  };

  RcTree(std::size_t dim, std::uint64_t seed);

  void insert(std::span<const double> point, std::size_t index);
  void forget(std::size_t index);

  /// Collusive displacement: max over ancestors of sibling size / own-side size.
  /// Zero while the tree holds a single leaf.
  double codisp(std::size_t index) const;

  std::size_t size() const { return root_ == kNone ? 0 : nodes_[root_].count; }
  std::size_t dim() const { return dim_; }
  bool contains(std::size_t index) const { return leaf_of_.count(index) != 0; }
  int root() const { return root_; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  /// Bounding box of a node; for leaves lo == hi == the point.
  std::span<const double> box_lo(int id) const;
  std::span<const double> box_hi(int id) const;
  int leaf_of(std::size_t index) const;
  std::size_t depth(std::size_t index) const;

 private:
  int allocate(bool leaf);
  void release(int id);
  void refresh_box(int id);
  std::span<double> lo_mut(int id);
  std::span<double> hi_mut(int id);

  std::size_t dim_;
  Rng rng_;
  int root_ = kNone;
  std::vector<Node> nodes_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<int> free_;
  std::unordered_map<std::size_t, int> leaf_of_;
};

/// Draws a cut over the box [lo, hi]: dimension d with probability
/// (hi[d] - lo[d]) / sum of ranges, value uniform within that dimension.
struct Cut {
  std::size_t dim;
  double value;
};
Cut draw_cut(std::span<const double> lo, std::span<const double> hi, Rng& rng);

enum class Mode { points, sequences };

struct ForestConfig {
  std::size_t n_trees = 51;
  std::size_t tree_size = 1001;
  Mode mode = Mode::points;
  std::size_t window_length = 100;
  std::size_t stride = 50;
  std::uint64_t seed = 42;

  /// Tuned values for the window-statistics variant.
  static ForestConfig sequences_defaults();
  void validate() const;
};

/// min, max, coefficient of variation, mean, variance, skewness, kurtosis.
using WindowFeatures = std::array<double, 7>;
WindowFeatures window_features(std::span<const double> window);

/// Streams vectors through n_trees trees of bounded occupancy and returns the
/// forest-mean codisp of each vector at its insertion.
std::vector<double> stream_scores(std::span<const double> flat_points, std::size_t dim,
                                  const ForestConfig& config,
                                  Execution exec = Execution::parallel);

ScoreSeries score_series(const TimeSeries& series, const ForestConfig& config,
                         Execution exec = Execution::parallel);

}  // namespace tsad::rrcf
