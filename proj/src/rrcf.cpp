#include "tsad/rrcf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tsad::rrcf {

RcTree::RcTree(std::size_t dim, std::uint64_t seed) : dim_(dim), rng_(seed) {
  if (dim == 0) throw InputError("RcTree: dimension must be > 0");
}

std::span<const double> RcTree::box_lo(int id) const {
  return {lo_.data() + static_cast<std::size_t>(id) * dim_, dim_};
}
std::span<const double> RcTree::box_hi(int id) const {
  return {hi_.data() + static_cast<std::size_t>(id) * dim_, dim_};
}
std::span<double> RcTree::lo_mut(int id) {
  return {lo_.data() + static_cast<std::size_t>(id) * dim_, dim_};
}
std::span<double> RcTree::hi_mut(int id) {
  return {hi_.data() + static_cast<std::size_t>(id) * dim_, dim_};
}

int RcTree::allocate(bool leaf) {
  int id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
    nodes_[static_cast<std::size_t>(id)] = Node{};
  } else {
    id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    lo_.resize(lo_.size() + dim_);
    hi_.resize(hi_.size() + dim_);
  }
  nodes_[static_cast<std::size_t>(id)].leaf = leaf;
  return id;
}

void RcTree::release(int id) {
  nodes_[static_cast<std::size_t>(id)] = Node{};
  free_.push_back(id);
}

void RcTree::refresh_box(int id) {
  const Node& n = node(id);
  auto lo = lo_mut(id);
  auto hi = hi_mut(id);
  const auto llo = box_lo(n.left), lhi = box_hi(n.left);
  const auto rlo = box_lo(n.right), rhi = box_hi(n.right);
  for (std::size_t d = 0; d < dim_; ++d) {
    lo[d] = std::min(llo[d], rlo[d]);
    hi[d] = std::max(lhi[d], rhi[d]);
  }
}

int RcTree::leaf_of(std::size_t index) const {
  const auto it = leaf_of_.find(index);
  if (it == leaf_of_.end()) throw InputError("RcTree: unknown point index " + std::to_string(index));
  return it->second;
}

std::size_t RcTree::depth(std::size_t index) const {
  std::size_t d = 0;
  for (int id = leaf_of(index); node(id).parent != kNone; id = node(id).parent) ++d;
  return d;
}

Cut draw_cut(std::span<const double> lo, std::span<const double> hi, Rng& rng) {
  double total = 0.0;
  std::size_t last = lo.size();
  for (std::size_t d = 0; d < lo.size(); ++d) {
    total += hi[d] - lo[d];
    if (hi[d] > lo[d]) last = d;
  }
  if (last == lo.size()) throw InputError("draw_cut: box has zero extent");
  double r = rng.uniform() * total;
  std::size_t dim = last;
  for (std::size_t d = 0; d < last; ++d) {
    const double span = hi[d] - lo[d];
    if (r < span) {
      dim = d;
      break;
    }
    r -= span;
  }
  // strictly below hi[dim]
  return {dim, std::min(lo[dim] + r, std::nextafter(hi[dim], lo[dim]))};
}

void RcTree::insert(std::span<const double> point, std::size_t index) {
  if (point.size() != dim_) {
    throw InputError("RcTree::insert: point has dimension " + std::to_string(point.size()) +
                     ", tree has " + std::to_string(dim_));
  }
  for (double v : point) {
    if (!std::isfinite(v)) throw InputError("RcTree::insert: non-finite coordinate");
  }
  if (contains(index)) throw InputError("RcTree::insert: index " + std::to_string(index) + " already present");

  auto make_leaf = [&] {
    const int id = allocate(true);
    auto lo = lo_mut(id);
    auto hi = hi_mut(id);
    std::copy(point.begin(), point.end(), lo.begin());
    std::copy(point.begin(), point.end(), hi.begin());
    Node& n = nodes_[static_cast<std::size_t>(id)];
    n.count = 1;
    n.indices.push_back(index);
    leaf_of_[index] = id;
    return id;
  };

  if (root_ == kNone) {
    root_ = make_leaf();
    return;
  }

  // Exact duplicate: follow the cuts to the only leaf that could hold it.
  {
    int id = root_;
    while (!node(id).leaf) id = point[node(id).cut_dim] <= node(id).cut ? node(id).left : node(id).right;
    const auto lo = box_lo(id);
    if (std::equal(lo.begin(), lo.end(), point.begin())) {
      Node& leaf = nodes_[static_cast<std::size_t>(id)];
      leaf.count += 1;
      leaf.indices.push_back(index);
      leaf_of_[index] = id;
      for (int up = leaf.parent; up != kNone; up = node(up).parent) nodes_[static_cast<std::size_t>(up)].count += 1;
      return;
    }
  }

  std::vector<double> ext_lo(dim_), ext_hi(dim_);
  int id = root_;
  while (true) {
    const auto lo = box_lo(id);
    const auto hi = box_hi(id);
    for (std::size_t d = 0; d < dim_; ++d) {
      ext_lo[d] = std::min(lo[d], point[d]);
      ext_hi[d] = std::max(hi[d], point[d]);
    }
    const Cut cut = draw_cut(ext_lo, ext_hi, rng_);
    const bool new_left = cut.value < lo[cut.dim];
    const bool new_right = !new_left && cut.value >= hi[cut.dim];
    if (!new_left && !new_right) {
      const Node& n = node(id);
      id = point[n.cut_dim] <= n.cut ? n.left : n.right;
      continue;
    }

    const int leaf = make_leaf();
    const int branch = allocate(false);
    const int parent = node(id).parent;
    {
      Node& b = nodes_[static_cast<std::size_t>(branch)];
      b.cut_dim = cut.dim;
      b.cut = cut.value;
      b.left = new_left ? leaf : id;
      b.right = new_left ? id : leaf;
      b.parent = parent;
      b.count = node(id).count + 1;
    }
    std::copy(ext_lo.begin(), ext_lo.end(), lo_mut(branch).begin());
    std::copy(ext_hi.begin(), ext_hi.end(), hi_mut(branch).begin());
    nodes_[static_cast<std::size_t>(leaf)].parent = branch;
    nodes_[static_cast<std::size_t>(id)].parent = branch;
    if (parent == kNone) {
      root_ = branch;
    } else {
      Node& p = nodes_[static_cast<std::size_t>(parent)];
      (p.left == id ? p.left : p.right) = branch;
    }
    for (int up = parent; up != kNone; up = node(up).parent) {
      nodes_[static_cast<std::size_t>(up)].count += 1;
      auto ulo = lo_mut(up);
      auto uhi = hi_mut(up);
      for (std::size_t d = 0; d < dim_; ++d) {
        ulo[d] = std::min(ulo[d], point[d]);
        uhi[d] = std::max(uhi[d], point[d]);
      }
    }
    return;
  }
}

void RcTree::forget(std::size_t index) {
  const int leaf = leaf_of(index);
  leaf_of_.erase(index);
  Node& l = nodes_[static_cast<std::size_t>(leaf)];
  if (l.count > 1) {
    l.count -= 1;
    l.indices.erase(std::find(l.indices.begin(), l.indices.end(), index));
    for (int up = l.parent; up != kNone; up = node(up).parent) nodes_[static_cast<std::size_t>(up)].count -= 1;
    return;
  }

  const int parent = l.parent;
  release(leaf);
  if (parent == kNone) {
    root_ = kNone;
    return;
  }
  const Node& p = node(parent);
  const int sibling = p.left == leaf ? p.right : p.left;
  const int grand = p.parent;
  release(parent);
  nodes_[static_cast<std::size_t>(sibling)].parent = grand;
  if (grand == kNone) {
    root_ = sibling;
    return;
  }
  Node& g = nodes_[static_cast<std::size_t>(grand)];
  (g.left == parent ? g.left : g.right) = sibling;
  for (int up = grand; up != kNone; up = node(up).parent) {
    nodes_[static_cast<std::size_t>(up)].count -= 1;
    refresh_box(up);
  }
}

double RcTree::codisp(std::size_t index) const {
  int id = leaf_of(index);
  double best = 0.0;
  while (node(id).parent != kNone) {
    const Node& p = node(node(id).parent);
    const int sibling = p.left == id ? p.right : p.left;
    best = std::max(best, static_cast<double>(node(sibling).count) / static_cast<double>(node(id).count));
    id = node(id).parent;
  }
  return best;
}

// ---------------------------------------------------------------------------

ForestConfig ForestConfig::sequences_defaults() {
  ForestConfig c;
  c.mode = Mode::sequences;
  c.n_trees = 68;
  c.tree_size = 150;
  c.window_length = 100;
  c.stride = 50;
  return c;
}

void ForestConfig::validate() const {
  if (n_trees < 1) throw InputError("rrcf: n_trees must be >= 1");
  if (tree_size < 2) throw InputError("rrcf: tree_size must be >= 2");
  if (mode == Mode::sequences && (window_length == 0 || stride == 0)) {
    throw InputError("rrcf: window_length and stride must be > 0 in sequences mode");
  }
}

WindowFeatures window_features(std::span<const double> w) {
  const double n = static_cast<double>(w.size());
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : w) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  double cv = 0.0, skew = 0.0, kurt = 0.0;
  if (m2 >= 1e-12) {
    const double sd = std::sqrt(m2);
    if (std::abs(mean) >= 1e-12) cv = sd / mean;
    skew = m3 / (m2 * sd);
    kurt = m4 / (m2 * m2);
  }
  return {*lo, *hi, cv, mean, m2, skew, kurt};
}

std::vector<double> stream_scores(std::span<const double> flat, std::size_t dim,
                                  const ForestConfig& config, Execution exec) {
  config.validate();
  if (dim == 0 || flat.size() % dim != 0) throw InputError("rrcf: point buffer not a multiple of dim");
  const std::size_t n = flat.size() / dim;
  const std::size_t trees = config.n_trees;
  std::vector<double> per_tree(trees * n, 0.0);

  auto run_tree = [&](std::size_t k) {
    RcTree tree(dim, config.seed + 0x9E3779B97F4A7C15ULL * (k + 1));
    double* row = per_tree.data() + k * n;
    for (std::size_t t = 0; t < n; ++t) {
      if (tree.size() >= config.tree_size) tree.forget(t - config.tree_size);
      tree.insert(flat.subspan(t * dim, dim), t);
      row[t] = tree.codisp(t);
    }
  };

  const auto tree_count = static_cast<std::ptrdiff_t>(trees);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < tree_count; ++k) run_tree(static_cast<std::size_t>(k));
  } else {
    for (std::ptrdiff_t k = 0; k < tree_count; ++k) run_tree(static_cast<std::size_t>(k));
  }

  std::vector<double> scores(n, 0.0);
  for (std::size_t k = 0; k < trees; ++k) {
    for (std::size_t t = 0; t < n; ++t) scores[t] += per_tree[k * n + t];
  }
  for (auto& s : scores) s /= static_cast<double>(trees);
  return scores;
}

ScoreSeries score_series(const TimeSeries& series, const ForestConfig& config, Execution exec) {
  config.validate();
  const auto& x = series.values;
  if (config.mode == Mode::points) {
    return {stream_scores(x, 1, config, exec), "rrcf"};
  }
  if (x.size() < config.window_length) {
    throw InputError("rrcf: series of length " + std::to_string(x.size()) +
                     " is shorter than window_length " + std::to_string(config.window_length));
  }
  const std::size_t windows = (x.size() - config.window_length) / config.stride + 1;
  std::vector<double> flat;
  flat.reserve(windows * 7);
  for (std::size_t k = 0; k < windows; ++k) {
    const auto f = window_features(std::span(x).subspan(k * config.stride, config.window_length));
    flat.insert(flat.end(), f.begin(), f.end());
  }
  const auto window_scores = stream_scores(flat, 7, config, exec);
  return expand_window_scores(window_scores, config.window_length, config.stride, x.size(),
                              "rrcf_sequences");
}

}  // namespace tsad::rrcf
