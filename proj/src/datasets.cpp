#include "crowdrank/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace crowdrank {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) {
    lines.pop_back();
  }
  return lines;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

[[noreturn]] void fail(const std::string& path, std::size_t line_no,
                       const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& tok, const std::string& path,
                    std::size_t line_no) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = first + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(path, line_no, "expected a number, got '" + tok + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

int parse_bit(const std::string& tok, const std::string& path,
              std::size_t line_no) {
  if (tok == "0") return 0;
  if (tok == "1") return 1;
  fail(path, line_no, "preference must be 0 or 1, got '" + tok + "'");
}

std::uint64_t pair_key(std::uint32_t i, std::uint32_t j) {
  return (static_cast<std::uint64_t>(i) << 32) | j;
}

std::unordered_map<std::string, std::uint32_t> id_index(
    const ItemTable& items) {
  std::unordered_map<std::string, std::uint32_t> index;
  index.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    index.emplace(items.ids[i], static_cast<std::uint32_t>(i));
  }
  return index;
}

}  // namespace

ItemTable load_items_csv(const std::string& path) {
  auto lines = read_lines(path);
  if (lines.empty()) {
    fail(path, 1, "empty file");
  }
  auto header = split(lines[0], ',');
  if (header.size() < 2 || header[0] != "id") {
    fail(path, 1, "expected header 'id,f1,...'");
  }
  const std::size_t dim = header.size() - 1;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::unordered_set<std::string> seen;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto cells = split(lines[n], ',');
    if (cells.size() != dim + 1) {
      fail(path, n + 1,
           "expected " + std::to_string(dim + 1) + " columns, got " +
               std::to_string(cells.size()));
    }
    if (!seen.insert(cells[0]).second) {
      fail(path, n + 1, "duplicate item id '" + cells[0] + "'");
    }
    std::vector<double> row(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      row[k] = parse_double(cells[k + 1], path, n + 1);
    }
    ids.push_back(cells[0]);
    rows.push_back(std::move(row));
  }
  if (ids.empty()) {
    fail(path, 2, "no item rows");
  }
  Matrix attrs(ids.size(), dim);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), attrs[i]);
  }
  return make_item_table(std::move(ids), std::move(attrs));
}

void save_items_csv(const std::string& path, const ItemTable& items) {
  std::ostringstream out;
  out << "id";
  for (std::size_t k = 0; k < items.dim(); ++k) {
    out << ",f" << (k + 1);
  }
  out << '\n';
  for (std::size_t i = 0; i < items.size(); ++i) {
    out << items.ids[i];
    for (std::size_t k = 0; k < items.dim(); ++k) {
      out << ',' << format_double(items.attrs[i][k]);
    }
    out << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ParseError(path + ": cannot open file for writing");
  }
  file << out.str();
}

WineTable load_wine_csv(const std::string& path,
                        const std::string& score_column) {
  auto lines = read_lines(path);
  if (lines.empty()) {
    fail(path, 1, "empty file");
  }
  auto header = split(lines[0], ';');
  std::size_t score_at = header.size();
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name = strip_quotes(header[c]);
    if (name == score_column) {
      score_at = c;
    } else {
      names.push_back(std::move(name));
    }
  }
  if (score_at == header.size()) {
    fail(path, 1, "no '" + score_column + "' column in header");
  }
  if (header.size() < 2) {
    fail(path, 1, "need at least one feature column besides the score");
  }
  const std::size_t dim = header.size() - 1;
  std::vector<std::vector<double>> rows;
  std::vector<double> quality;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto cells = split(lines[n], ';');
    if (cells.size() != header.size()) {
      fail(path, n + 1,
           "expected " + std::to_string(header.size()) + " columns, got " +
               std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(dim);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = parse_double(strip_quotes(cells[c]), path, n + 1);
      if (c == score_at) {
        quality.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    fail(path, 2, "no data rows");
  }
  std::vector<std::string> ids(rows.size());
  Matrix attrs(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ids[i] = std::to_string(i);
    std::copy(rows[i].begin(), rows[i].end(), attrs[i]);
  }
  WineTable wine;
  wine.items = make_item_table(std::move(ids), std::move(attrs));
  wine.quality = std::move(quality);
  wine.feature_names = std::move(names);
  return wine;
}

void save_wine_csv(const std::string& path, const WineTable& wine,
                   const std::string& score_column) {
  if (wine.quality.size() != wine.items.size()) {
    throw InvalidInput("score count does not match item count");
  }
  std::vector<std::string> names = wine.feature_names;
  if (names.empty()) {
    for (std::size_t k = 0; k < wine.items.dim(); ++k) {
      names.push_back("f" + std::to_string(k + 1));
    }
  }
  if (names.size() != wine.items.dim()) {
    throw InvalidInput("feature name count does not match feature count");
  }
  std::ostringstream out;
  for (const auto& name : names) {
    out << '"' << name << '"' << ';';
  }
  out << '"' << score_column << '"' << '\n';
  for (std::size_t i = 0; i < wine.items.size(); ++i) {
    for (std::size_t k = 0; k < wine.items.dim(); ++k) {
      out << format_double(wine.items.attrs[i][k]) << ';';
    }
    out << format_double(wine.quality[i]) << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ParseError(path + ": cannot open file for writing");
  }
  file << out.str();
}

AnnotationSet load_annotations_csv(const std::string& path,
                                   const ItemTable& items) {
  auto lines = read_lines(path);
  if (lines.empty()) {
    fail(path, 1, "empty file");
  }
  if (split(lines[0], ',') !=
      std::vector<std::string>{"annotator", "item_i", "item_j", "pref"}) {
    fail(path, 1, "expected header 'annotator,item_i,item_j,pref'");
  }
  auto index = id_index(items);
  std::vector<std::string> annotator_ids;
  std::unordered_map<std::string, std::size_t> annotator_at;
  std::vector<std::unordered_map<std::uint64_t, std::uint8_t>> votes;
  std::map<std::uint64_t, std::uint32_t> pair_set;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto cells = split(lines[n], ',');
    if (cells.size() != 4) {
      fail(path, n + 1,
           "expected 4 columns, got " + std::to_string(cells.size()));
    }
    auto it_i = index.find(cells[1]);
    if (it_i == index.end()) {
      fail(path, n + 1, "unknown item id '" + cells[1] + "'");
    }
    auto it_j = index.find(cells[2]);
    if (it_j == index.end()) {
      fail(path, n + 1, "unknown item id '" + cells[2] + "'");
    }
    std::uint32_t i = it_i->second;
    std::uint32_t j = it_j->second;
    if (i == j) {
      fail(path, n + 1, "item compared against itself: '" + cells[1] + "'");
    }
    int bit = parse_bit(cells[3], path, n + 1);
    if (i > j) {
      std::swap(i, j);
      bit = 1 - bit;
    }
    auto [a_it, fresh] = annotator_at.emplace(cells[0], annotator_ids.size());
    if (fresh) {
      annotator_ids.push_back(cells[0]);
      votes.emplace_back();
    }
    auto key = pair_key(i, j);
    if (!votes[a_it->second].emplace(key, static_cast<std::uint8_t>(bit))
             .second) {
      fail(path, n + 1,
           "duplicate vote by '" + cells[0] + "' on pair (" + cells[1] + "," +
               cells[2] + ")");
    }
    pair_set.try_emplace(key, 0);
  }
  if (annotator_ids.empty()) {
    fail(path, 2, "no annotation rows");
  }
  std::string missing_report;
  for (std::size_t k = 0; k < annotator_ids.size(); ++k) {
    if (votes[k].size() == pair_set.size()) continue;
    std::size_t missing = pair_set.size() - votes[k].size();
    if (!missing_report.empty()) {
      missing_report += "; ";
    }
    missing_report += annotator_ids[k] + " missing " +
                      std::to_string(missing) + " pair(s)";
  }
  if (!missing_report.empty()) {
    throw IncompleteAnnotation("incomplete annotation coverage: " +
                               missing_report);
  }
  PairIndex pairs;
  pairs.pairs.reserve(pair_set.size());
  for (const auto& [key, unused] : pair_set) {
    (void)unused;
    pairs.pairs.push_back(Pair{static_cast<std::uint32_t>(key >> 32),
                               static_cast<std::uint32_t>(key & 0xffffffffu)});
  }
  std::vector<LabelColumn> columns(annotator_ids.size());
  for (std::size_t k = 0; k < annotator_ids.size(); ++k) {
    columns[k].bits.resize(pairs.pairs.size());
    for (std::size_t p = 0; p < pairs.pairs.size(); ++p) {
      columns[k].bits[p] =
          votes[k].at(pair_key(pairs.pairs[p].i, pairs.pairs[p].j));
    }
  }
  return make_annotation_set(std::move(pairs), std::move(annotator_ids),
                             std::move(columns));
}

void save_annotations_csv(const std::string& path,
                          const AnnotationSet& annotations,
                          const ItemTable& items) {
  std::ostringstream out;
  out << "annotator,item_i,item_j,pref\n";
  for (std::size_t k = 0; k < annotations.num_annotators(); ++k) {
    for (std::size_t p = 0; p < annotations.num_pairs(); ++p) {
      const Pair& pair = annotations.pairs.pairs[p];
      out << annotations.annotator_ids[k] << ',' << items.ids[pair.i] << ','
          << items.ids[pair.j] << ','
          << static_cast<int>(annotations.columns[k].bits[p]) << '\n';
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ParseError(path + ": cannot open file for writing");
  }
  file << out.str();
}

void save_labels_csv(const std::string& path, const LabelColumn& labels,
                     const PairIndex& pairs, const ItemTable& items) {
  if (labels.bits.size() != pairs.pairs.size()) {
    throw InvalidInput("label count does not match pair count");
  }
  std::ostringstream out;
  out << "item_i,item_j,pref\n";
  for (std::size_t p = 0; p < pairs.pairs.size(); ++p) {
    const Pair& pair = pairs.pairs[p];
    out << items.ids[pair.i] << ',' << items.ids[pair.j] << ','
        << static_cast<int>(labels.bits[p]) << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ParseError(path + ": cannot open file for writing");
  }
  file << out.str();
}

LabelColumn load_labels_csv(const std::string& path, const ItemTable& items,
                            const PairIndex& expected_pairs) {
  auto lines = read_lines(path);
  if (lines.empty()) {
    fail(path, 1, "empty file");
  }
  if (split(lines[0], ',') !=
      std::vector<std::string>{"item_i", "item_j", "pref"}) {
    fail(path, 1, "expected header 'item_i,item_j,pref'");
  }
  auto index = id_index(items);
  std::unordered_map<std::uint64_t, std::uint8_t> bits;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto cells = split(lines[n], ',');
    if (cells.size() != 3) {
      fail(path, n + 1,
           "expected 3 columns, got " + std::to_string(cells.size()));
    }
    auto it_i = index.find(cells[0]);
    if (it_i == index.end()) {
      fail(path, n + 1, "unknown item id '" + cells[0] + "'");
    }
    auto it_j = index.find(cells[1]);
    if (it_j == index.end()) {
      fail(path, n + 1, "unknown item id '" + cells[1] + "'");
    }
    std::uint32_t i = it_i->second;
    std::uint32_t j = it_j->second;
    if (i == j) {
      fail(path, n + 1, "item compared against itself: '" + cells[0] + "'");
    }
    int bit = parse_bit(cells[2], path, n + 1);
    if (i > j) {
      std::swap(i, j);
      bit = 1 - bit;
    }
    if (!bits.emplace(pair_key(i, j), static_cast<std::uint8_t>(bit)).second) {
      fail(path, n + 1,
           "duplicate label for pair (" + cells[0] + "," + cells[1] + ")");
    }
  }
  if (bits.size() != expected_pairs.pairs.size()) {
    throw InvalidInput(path + ": expected labels for " +
                       std::to_string(expected_pairs.pairs.size()) +
                       " pairs, got " + std::to_string(bits.size()));
  }
  LabelColumn labels;
  labels.bits.resize(expected_pairs.pairs.size());
  for (std::size_t p = 0; p < expected_pairs.pairs.size(); ++p) {
    auto it =
        bits.find(pair_key(expected_pairs.pairs[p].i, expected_pairs.pairs[p].j));
    if (it == bits.end()) {
      throw InvalidInput(path + ": no label for pair (" +
                         items.ids[expected_pairs.pairs[p].i] + "," +
                         items.ids[expected_pairs.pairs[p].j] + ")");
    }
    labels.bits[p] = it->second;
  }
  return labels;
}

std::vector<double> load_scores_csv(const std::string& path,
                                    const ItemTable& items) {
  auto lines = read_lines(path);
  if (lines.empty()) {
    fail(path, 1, "empty file");
  }
  if (split(lines[0], ',') != std::vector<std::string>{"id", "score"}) {
    fail(path, 1, "expected header 'id,score'");
  }
  auto index = id_index(items);
  std::vector<double> scores(items.size());
  std::vector<bool> seen(items.size(), false);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto cells = split(lines[n], ',');
    if (cells.size() != 2) {
      fail(path, n + 1,
           "expected 2 columns, got " + std::to_string(cells.size()));
    }
    auto it = index.find(cells[0]);
    if (it == index.end()) {
      fail(path, n + 1, "unknown item id '" + cells[0] + "'");
    }
    if (seen[it->second]) {
      fail(path, n + 1, "duplicate score for item '" + cells[0] + "'");
    }
    seen[it->second] = true;
    scores[it->second] = parse_double(cells[1], path, n + 1);
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!seen[i]) {
      throw InvalidInput(path + ": no score for item '" + items.ids[i] + "'");
    }
  }
  return scores;
}

void save_scores_csv(const std::string& path, const ItemTable& items,
                     const std::vector<double>& scores) {
  if (scores.size() != items.size()) {
    throw InvalidInput("score count does not match item count");
  }
  std::ostringstream out;
  out << "id,score\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    out << items.ids[i] << ',' << format_double(scores[i]) << '\n';
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ParseError(path + ": cannot open file for writing");
  }
  file << out.str();
}

}  // namespace crowdrank
