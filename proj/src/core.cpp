#include "crowdrank/core.hpp"

#include <cmath>
#include <unordered_set>

namespace crowdrank {

ItemTable make_item_table(std::vector<std::string> ids, Matrix attrs) {
  if (ids.empty()) throw InvalidInput("item table is empty");
  if (attrs.rows() != ids.size())
    throw InvalidInput("attribute row count does not match id count");
  if (attrs.cols() < 1) throw InvalidInput("attribute dimension must be >= 1");
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw InvalidInput("duplicate item id '" + id + "'");
  }
  return ItemTable{std::move(ids), std::move(attrs)};
}

AnnotationSet make_annotation_set(PairIndex pairs,
                                  std::vector<std::string> annotator_ids,
                                  std::vector<LabelColumn> columns) {
  if (columns.empty()) throw InvalidInput("annotation set needs at least one annotator");
  if (annotator_ids.size() != columns.size())
    throw InvalidInput("annotator id count does not match column count");
  for (const auto& col : columns) {
    if (col.size() != pairs.size())
      throw InvalidInput("label column length does not match pair index");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : annotator_ids) {
    if (!seen.insert(id).second)
      throw InvalidInput("duplicate annotator id '" + id + "'");
  }
  return AnnotationSet{std::move(pairs), std::move(annotator_ids), std::move(columns)};
}

PairIndex build_pair_index(const ItemTable& items,
                           const std::vector<double>* ground_scores) {
  if (items.size() == 0) throw InvalidInput("item table is empty");
  if (ground_scores && ground_scores->size() != items.size())
    throw InvalidInput("score vector length does not match item count");
  PairIndex index;
  const std::size_t n = items.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ground_scores && (*ground_scores)[i] == (*ground_scores)[j]) continue;
      index.pairs.push_back({static_cast<std::uint32_t>(i),
                             static_cast<std::uint32_t>(j)});
    }
  }
  return index;
}

LabelColumn ground_truth_labels(const PairIndex& pairs,
                                const std::vector<double>& scores) {
  LabelColumn col;
  col.bits.reserve(pairs.size());
  for (const Pair& p : pairs.pairs) {
    if (p.i >= scores.size() || p.j >= scores.size())
      throw InvalidInput("pair index references a missing score");
    const double si = scores[p.i];
    const double sj = scores[p.j];
    if (si == sj) throw InvalidInput("tied scores in ground truth pair");
    col.bits.push_back(si > sj ? 1 : 0);
  }
  return col;
}

std::vector<double> difference_vector(std::span<const double> xi,
                                      std::span<const double> xj) {
  if (xi.size() != xj.size()) throw InvalidInput("difference of unequal dimensions");
  std::vector<double> out(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) out[k] = xi[k] - xj[k];
  return out;
}

Matrix pair_differences(const ItemTable& items, const PairIndex& pairs) {
  const std::size_t d = items.dim();
  Matrix diffs(pairs.size(), d);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Pair& pr = pairs.pairs[p];
    const double* xi = items.attrs[pr.i];
    const double* xj = items.attrs[pr.j];
    double* row = diffs[p];
    for (std::size_t k = 0; k < d; ++k) row[k] = xi[k] - xj[k];
  }
  return diffs;
}

StandardizeResult standardize_features(const ItemTable& items) {
  const std::size_t n = items.size();
  const std::size_t d = items.dim();
  if (n < 2) throw InvalidInput("standardization needs at least 2 items");

  StandardizeResult result;
  result.mean.assign(d, 0.0);
  result.scale.assign(d, 1.0);
  result.constant_dims.assign(d, 0);

  for (std::size_t k = 0; k < d; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += items.attrs[i][k];
    result.mean[k] = sum / static_cast<double>(n);
  }
  for (std::size_t k = 0; k < d; ++k) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = items.attrs[i][k] - result.mean[k];
      ss += c * c;
    }
    const double var = ss / static_cast<double>(n - 1);
    if (var > 0.0) {
      result.scale[k] = std::sqrt(var);
    } else {
      result.constant_dims[k] = 1;
    }
  }

  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      out[i][k] = result.constant_dims[k]
                      ? 0.0
                      : (items.attrs[i][k] - result.mean[k]) / result.scale[k];
    }
  }
  result.items = ItemTable{items.ids, std::move(out)};
  return result;
}

}  // namespace crowdrank
