#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdrank {

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IncompleteAnnotation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double* operator[](std::size_t r) { return data_.data() + r * cols_; }
  const double* operator[](std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct ItemTable {
  std::vector<std::string> ids;
  Matrix attrs;  // one row per item

  std::size_t size() const { return ids.size(); }
  std::size_t dim() const { return attrs.cols(); }
};

// Validates id uniqueness, shape agreement, and d >= 1.
ItemTable make_item_table(std::vector<std::string> ids, Matrix attrs);

struct Pair {
  std::uint32_t i;
  std::uint32_t j;
  bool operator==(const Pair&) const = default;
};

struct PairIndex {
  std::vector<Pair> pairs;
  std::size_t size() const { return pairs.size(); }
  bool operator==(const PairIndex&) const = default;
};

// One bit per pair, in PairIndex order. Bit 1 at (i,j) means item i ranks
// above item j in this column's opinion.
struct LabelColumn {
  std::vector<std::uint8_t> bits;
  std::size_t size() const { return bits.size(); }
  bool operator==(const LabelColumn&) const = default;
};

// Complete annotation: every annotator labels every pair of one PairIndex.
struct AnnotationSet {
  PairIndex pairs;
  std::vector<std::string> annotator_ids;
  std::vector<LabelColumn> columns;

  std::size_t num_annotators() const { return columns.size(); }
  std::size_t num_pairs() const { return pairs.size(); }
  bool operator==(const AnnotationSet&) const = default;
};

// Validates column lengths and id/column agreement.
AnnotationSet make_annotation_set(PairIndex pairs,
                                  std::vector<std::string> annotator_ids,
                                  std::vector<LabelColumn> columns);

}  // namespace crowdrank
