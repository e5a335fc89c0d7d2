#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hydrofeat/error.hpp"
#include "hydrofeat/features.hpp"
#include "hydrofeat/parallel.hpp"

namespace hydrofeat {

/// Observations x named predictors, row-major, with an aligned target.
/// The target may be empty when the matrix only carries probe rows.
struct DesignMatrix {
  std::vector<std::string> columns;
  std::vector<double> values;
  std::vector<double> target;

  std::size_t cols() const { return columns.size(); }
  std::size_t rows() const { return columns.empty() ? 0 : values.size() / columns.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols(), cols()}; }

  void check(bool require_target) const {
    if (columns.empty()) fail(ErrorCode::EmptyPredictors, "design matrix has no predictors");
    if (values.size() % columns.size() != 0) fail(ErrorCode::ColumnMismatch, "ragged design matrix");
    std::set<std::string> unique(columns.begin(), columns.end());
    if (unique.size() != columns.size()) fail(ErrorCode::ColumnMismatch, "duplicate predictor names");
    for (double v : values) {
      if (!std::isfinite(v)) fail(ErrorCode::NonFinite, "design matrix holds a missing or non-finite entry");
    }
    if (require_target) {
      if (rows() < 2) fail(ErrorCode::TooShort, "design matrix needs at least 2 rows");
      if (target.size() != rows()) fail(ErrorCode::LengthMismatch, "target length differs from row count");
      for (double v : target) {
        if (!std::isfinite(v)) fail(ErrorCode::NonFinite, "target holds a missing or non-finite entry");
      }
    }
  }
};

struct ForestParams {
  std::size_t n_trees = 2000;
  std::size_t mtry = 0;  // 0 selects max(1, floor(p / 3))
  std::size_t min_node_size = 5;
  std::size_t workers = 1;

  std::size_t effective_mtry(std::size_t p) const {
    const std::size_t m = mtry ? mtry : std::max<std::size_t>(1, p / 3);
    return std::min(m, p);
  }
};

struct TreeNode {
  static constexpr std::uint32_t kLeaf = static_cast<std::uint32_t>(-1);
  std::uint32_t feature = kLeaf;
  double threshold = 0.0;  // rows with x <= threshold go left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double value = 0.0;      // leaf mean
  std::uint32_t size = 0;  // in-bag rows reaching the node

  bool is_leaf() const { return feature == kLeaf; }
};

class RegressionTree {
 public:
  std::vector<TreeNode> nodes;
  // Draw count of every training row in this tree's bootstrap sample.
  std::vector<std::uint32_t> inbag_counts;
  std::vector<std::uint32_t> oob_rows;

  double predict(std::span<const double> row) const {
    std::uint32_t i = 0;
    while (!nodes[i].is_leaf()) i = row[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
  }
};

struct ForestModel {
  std::vector<std::string> columns;
  ForestParams params;
  std::uint64_t seed = 0;
  std::vector<RegressionTree> trees;
};

namespace detail {

struct SplitCandidate {
  double gain = 0.0;
  std::uint32_t feature = TreeNode::kLeaf;
  double threshold = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(const DesignMatrix& data, std::size_t mtry, std::size_t min_node_size, std::mt19937_64& rng)
      : data_(data), mtry_(mtry), min_node_(std::max<std::size_t>(min_node_size, 1)), rng_(rng) {}

  RegressionTree grow() {
    const std::size_t n = data_.rows();
    RegressionTree tree;
    tree.inbag_counts.assign(n, 0);
    std::uniform_int_distribution<std::size_t> draw(0, n - 1);
    sample_.resize(n);
    for (auto& s : sample_) {
      s = static_cast<std::uint32_t>(draw(rng_));
      ++tree.inbag_counts[s];
    }
    for (std::uint32_t r = 0; r < n; ++r) {
      if (tree.inbag_counts[r] == 0) tree.oob_rows.push_back(r);
    }

    struct Pending {
      std::uint32_t node;
      std::size_t begin, end;
    };
    tree.nodes.push_back({});
    std::vector<Pending> stack{{0, 0, n}};
    while (!stack.empty()) {
      const Pending job = stack.back();
      stack.pop_back();
      const auto split = best_split(job.begin, job.end);
      TreeNode& node = tree.nodes[job.node];
      node.size = static_cast<std::uint32_t>(job.end - job.begin);
      if (split.feature == TreeNode::kLeaf) {
        double s = 0.0;
        for (std::size_t i = job.begin; i < job.end; ++i) s += data_.target[sample_[i]];
        node.value = s / static_cast<double>(job.end - job.begin);
        continue;
      }
      const auto mid = std::stable_partition(sample_.begin() + static_cast<std::ptrdiff_t>(job.begin),
                                             sample_.begin() + static_cast<std::ptrdiff_t>(job.end),
                                             [&](std::uint32_t r) { return data_.at(r, split.feature) <= split.threshold; });
      const std::size_t cut = static_cast<std::size_t>(mid - sample_.begin());
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = static_cast<std::uint32_t>(tree.nodes.size());
      node.right = node.left + 1;
      const std::uint32_t left = node.left, right = node.right;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      // Right pushed first so the left subtree is grown first.
      stack.push_back({right, cut, job.end});
      stack.push_back({left, job.begin, cut});
    }
    return tree;
  }

 private:
  SplitCandidate best_split(std::size_t begin, std::size_t end) {
    SplitCandidate best;
    const std::size_t m = end - begin;
    if (m < 2 * min_node_) return best;

    double sum = 0.0, sum_sq = 0.0;
    const double first = data_.target[sample_[begin]];
    bool pure = true;
    for (std::size_t i = begin; i < end; ++i) {
      const double y = data_.target[sample_[i]];
      sum += y;
      sum_sq += y * y;
      pure = pure && y == first;
    }
    if (pure) return best;
    const double parent = sum * sum / static_cast<double>(m);
    const double min_gain = parent + 1e-12 * std::max(sum_sq, 1e-300);

    // Partial Fisher-Yates draw of mtry candidate predictors.
    const std::size_t p = data_.cols();
    candidates_.resize(p);
    std::iota(candidates_.begin(), candidates_.end(), 0u);
    for (std::size_t i = 0; i < mtry_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, p - 1);
      std::swap(candidates_[i], candidates_[pick(rng_)]);
    }
    std::sort(candidates_.begin(), candidates_.begin() + static_cast<std::ptrdiff_t>(mtry_));

    pairs_.resize(m);
    best.gain = min_gain;
    for (std::size_t c = 0; c < mtry_; ++c) {
      const std::uint32_t f = candidates_[c];
      for (std::size_t i = 0; i < m; ++i) {
        const std::uint32_t r = sample_[begin + i];
        pairs_[i] = {data_.at(r, f), data_.target[r]};
      }
      std::sort(pairs_.begin(), pairs_.end());
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        left_sum += pairs_[i].second;
        const std::size_t n_left = i + 1, n_right = m - n_left;
        if (n_left < min_node_ || n_right < min_node_) continue;
        if (!(pairs_[i].first < pairs_[i + 1].first)) continue;
        const double right_sum = sum - left_sum;
        const double gain =
            left_sum * left_sum / static_cast<double>(n_left) + right_sum * right_sum / static_cast<double>(n_right);
        if (gain > best.gain) {
          double thr = 0.5 * (pairs_[i].first + pairs_[i + 1].first);
          if (!(thr < pairs_[i + 1].first)) thr = pairs_[i].first;
          best = {gain, f, thr};
        }
      }
    }
    return best;
  }

  const DesignMatrix& data_;
  std::size_t mtry_;
  std::size_t min_node_;
  std::mt19937_64& rng_;
  std::vector<std::uint32_t> sample_;
  std::vector<std::uint32_t> candidates_;
  std::vector<std::pair<double, double>> pairs_;
};

}  // namespace detail

/// Grows params.n_trees CART regression trees, each on its own bootstrap
/// sample with mtry candidate predictors per node. Tree t draws from the
/// substream mix_seed(seed, t), so results do not depend on params.workers.
inline ForestModel fit(const DesignMatrix& data, const ForestParams& params, std::uint64_t seed) {
  data.check(true);
  const double y0 = data.target.front();
  if (std::all_of(data.target.begin(), data.target.end(), [y0](double y) { return y == y0; })) {
    fail(ErrorCode::DegenerateTarget, "target is constant");
  }
  if (params.n_trees == 0) fail(ErrorCode::Config, "forest needs at least one tree");

  ForestModel model{data.columns, params, seed, std::vector<RegressionTree>(params.n_trees)};
  const std::size_t mtry = params.effective_mtry(data.cols());
  parallel_for(params.n_trees, params.workers, [&](std::size_t t) {
    std::mt19937_64 rng(mix_seed(seed, t));
    model.trees[t] = detail::TreeGrower(data, mtry, params.min_node_size, rng).grow();
  });
  return model;
}

inline void check_columns(const ForestModel& model, const DesignMatrix& rows) {
  if (rows.columns != model.columns) fail(ErrorCode::ColumnMismatch, "probe columns differ from training columns");
}

inline double predict_row(const ForestModel& model, std::span<const double> row) {
  double s = 0.0;
  for (const auto& tree : model.trees) s += tree.predict(row);
  return s / static_cast<double>(model.trees.size());
}

inline std::vector<double> predict(const ForestModel& model, const DesignMatrix& rows) {
  check_columns(model, rows);
  rows.check(false);
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = predict_row(model, rows.row(r));
  return out;
}

struct OobPredictions {
  std::vector<double> prediction;   // NaN where the row is in-bag for every tree
  std::vector<std::size_t> n_trees;  // trees for which the row is out-of-bag
};

inline OobPredictions oob_predictions(const ForestModel& model, const DesignMatrix& data) {
  check_columns(model, data);
  const std::size_t n = data.rows();
  OobPredictions out{std::vector<double>(n, 0.0), std::vector<std::size_t>(n, 0)};
  for (const auto& tree : model.trees) {
    if (tree.inbag_counts.size() != n) fail(ErrorCode::LengthMismatch, "data is not the training data of this model");
    for (auto r : tree.oob_rows) {
      out.prediction[r] += tree.predict(data.row(r));
      ++out.n_trees[r];
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    out.prediction[r] = out.n_trees[r] ? out.prediction[r] / static_cast<double>(out.n_trees[r])
                                       : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

/// Mean squared error of out-of-bag ensemble predictions. Rows that were
/// in-bag for every tree are skipped.
inline double oob_error(const ForestModel& model, const DesignMatrix& data) {
  const auto oob = oob_predictions(model, data);
  double sse = 0.0;
  std::size_t covered = 0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (oob.n_trees[r] == 0) continue;
    const double e = oob.prediction[r] - data.target[r];
    sse += e * e;
    ++covered;
  }
  if (covered == 0) fail(ErrorCode::NoOobCoverage, "no row is out-of-bag in any tree");
  return sse / static_cast<double>(covered);
}

struct ImportanceReport {
  std::vector<std::string> predictors;
  std::vector<double> scores;
  std::vector<std::size_t> ranks;  // 1 = most important

  double score(std::string_view name) const {
    for (std::size_t i = 0; i < predictors.size(); ++i) {
      if (predictors[i] == name) return scores[i];
    }
    fail(ErrorCode::UnknownAttribute, "no predictor named " + std::string(name));
  }
  std::size_t rank(std::string_view name) const {
    for (std::size_t i = 0; i < predictors.size(); ++i) {
      if (predictors[i] == name) return ranks[i];
    }
    fail(ErrorCode::UnknownAttribute, "no predictor named " + std::string(name));
  }
};

/// Ranks scores descending; equal scores are ordered by predictor name.
inline std::vector<std::size_t> rank_descending(const std::vector<double>& scores,
                                                const std::vector<std::string>& names) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return names[a] < names[b];
  });
  std::vector<std::size_t> ranks(scores.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = pos + 1;
  return ranks;
}

/// Unnormalized permutation importance: per tree, the increase in out-of-bag
/// MSE after shuffling one predictor among that tree's out-of-bag rows,
/// averaged over trees that have out-of-bag rows.
inline ImportanceReport permutation_importance(const ForestModel& model, const DesignMatrix& data, std::uint64_t seed) {
  check_columns(model, data);
  const std::size_t p = data.cols();
  const std::size_t n_trees = model.trees.size();
  std::vector<std::vector<double>> per_tree(n_trees);

  parallel_for(n_trees, model.params.workers, [&](std::size_t t) {
    const auto& tree = model.trees[t];
    if (tree.oob_rows.empty()) return;
    std::mt19937_64 rng(mix_seed(seed, t));
    const std::size_t m = tree.oob_rows.size();
    double base = 0.0;
    for (auto r : tree.oob_rows) {
      const double e = tree.predict(data.row(r)) - data.target[r];
      base += e * e;
    }
    base /= static_cast<double>(m);

    std::vector<double> row(p);
    std::vector<std::uint32_t> shuffled(tree.oob_rows);
    auto& diffs = per_tree[t];
    diffs.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
      std::copy(tree.oob_rows.begin(), tree.oob_rows.end(), shuffled.begin());
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      double permuted = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const auto r = tree.oob_rows[k];
        const auto src = data.row(r);
        std::copy(src.begin(), src.end(), row.begin());
        row[j] = data.at(shuffled[k], j);
        const double e = tree.predict(row) - data.target[r];
        permuted += e * e;
      }
      diffs[j] = permuted / static_cast<double>(m) - base;
    }
  });

  ImportanceReport report{data.columns, std::vector<double>(p, 0.0), {}};
  std::size_t used = 0;
  for (const auto& diffs : per_tree) {
    if (diffs.empty()) continue;
    ++used;
    for (std::size_t j = 0; j < p; ++j) report.scores[j] += diffs[j];
  }
  if (used == 0) fail(ErrorCode::NoOobCoverage, "no tree has out-of-bag rows");
  for (auto& s : report.scores) s /= static_cast<double>(used);
  report.ranks = rank_descending(report.scores, report.predictors);
  return report;
}

/// Debug dump; the layout is not a stable format.
inline void dump_model(std::ostream& os, const ForestModel& model) {
  os << "forest trees=" << model.trees.size() << " mtry=" << model.params.effective_mtry(model.columns.size())
     << " min_node_size=" << model.params.min_node_size << " seed=" << model.seed << '\n';
  os << "columns";
  for (const auto& c : model.columns) os << ' ' << c;
  os << '\n';
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const auto& tree = model.trees[t];
    os << "tree " << t << " nodes=" << tree.nodes.size() << " oob=" << tree.oob_rows.size() << '\n';
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const auto& node = tree.nodes[i];
      if (node.is_leaf()) {
        os << "  " << i << " leaf n=" << node.size << " value=" << format_double(node.value) << '\n';
      } else {
        os << "  " << i << " split " << model.columns[node.feature] << " <= " << format_double(node.threshold)
           << " -> " << node.left << ' ' << node.right << '\n';
      }
    }
  }
}

}  // namespace hydrofeat
