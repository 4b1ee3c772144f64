#include <doctest.h>

#include <string>
#include <vector>

#include "crowdrank/core.hpp"
#include "crowdrank/datasets.hpp"
#include "support/fixture.hpp"

using namespace crowdrank;
using crowdtest::fixture_dir;
using crowdtest::fresh_dir;
using crowdtest::read_file;
using crowdtest::write_file;

namespace {

template <typename E>
std::string message_of(void (*fn)(const std::string&), const std::string& path) {
  try {
    fn(path);
  } catch (const E& e) {
    return e.what();
  }
  return "";
}

void load_items_void(const std::string& path) { load_items_csv(path); }

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("item table round-trips through CSV") {
  const auto dir = fresh_dir("items_rt");
  const auto line = crowdtest::separable_line(7, 5);
  const auto path = dir + "/items.csv";
  save_items_csv(path, line.items);
  const auto back = load_items_csv(path);
  CHECK(back.ids == line.items.ids);
  CHECK(back.attrs == line.items.attrs);
}

TEST_CASE("item parsing reports position and cause") {
  const auto dir = fresh_dir("items_err");
  const auto bad_header = dir + "/h.csv";
  write_file(bad_header, "name,f1\na,1\n");
  CHECK(contains(message_of<ParseError>(load_items_void, bad_header), ":1:"));

  const auto dup = dir + "/dup.csv";
  write_file(dup, "id,f1\na,1\na,2\n");
  const auto dup_msg = message_of<ParseError>(load_items_void, dup);
  CHECK(contains(dup_msg, ":3:"));
  CHECK(contains(dup_msg, "duplicate item id 'a'"));

  const auto bad_num = dir + "/num.csv";
  write_file(bad_num, "id,f1\na,1\nb,oops\n");
  CHECK(contains(message_of<ParseError>(load_items_void, bad_num), "'oops'"));

  const auto ragged = dir + "/ragged.csv";
  write_file(ragged, "id,f1,f2\na,1\n");
  CHECK(contains(message_of<ParseError>(load_items_void, ragged),
                 "expected 3 columns, got 2"));

  CHECK_THROWS_AS(load_items_csv(dir + "/missing.csv"), ParseError);
}

TEST_CASE("score-table round-trip keeps column names and order") {
  const auto dir = fresh_dir("wine_rt");
  const auto wine = crowdtest::separable_line(5, 12);
  const auto path = dir + "/wine.csv";
  save_wine_csv(path, wine, "quality");
  const auto back = load_wine_csv(path);
  CHECK(back.items.attrs == wine.items.attrs);
  CHECK(back.quality == wine.quality);
  REQUIRE(back.feature_names.size() == wine.items.dim());
  // Row ordinals become the ids.
  CHECK(back.items.ids[0] == "0");
  CHECK(back.items.ids[4] == "4");
}

TEST_CASE("score column may sit anywhere in the header") {
  const auto dir = fresh_dir("wine_mid");
  const auto path = dir + "/mid.csv";
  write_file(path,
             "\"acid\";\"quality\";\"sugar\"\n"
             "1.5;6;0.2\n"
             "2.5;4;0.9\n");
  const auto wine = load_wine_csv(path);
  REQUIRE(wine.items.size() == 2);
  REQUIRE(wine.items.dim() == 2);
  CHECK(wine.feature_names == std::vector<std::string>{"acid", "sugar"});
  CHECK(wine.quality == std::vector<double>{6.0, 4.0});
  CHECK(wine.items.attrs[1][0] == 2.5);
  CHECK(wine.items.attrs[1][1] == 0.9);

  const auto other = load_wine_csv(path, "sugar");
  CHECK(other.quality == std::vector<double>{0.2, 0.9});
  CHECK(other.feature_names == std::vector<std::string>{"acid", "quality"});

  CHECK_THROWS_AS(load_wine_csv(path, "nope"), ParseError);
}

TEST_CASE("annotations round-trip and canonicalize orientation") {
  const auto dir = fresh_dir("ann_rt");
  const auto fx = crowdtest::fixture10();
  const auto ann = crowdtest::fixture10_annotations(fx.items);
  const auto path = dir + "/ann.csv";
  save_annotations_csv(path, ann, fx.items);
  const auto back = load_annotations_csv(path, fx.items);
  CHECK(back == ann);

  // The same votes written with every row flipped to the (j, i) orientation
  // must load identically.
  std::string flipped = "annotator,item_i,item_j,pref\n";
  for (std::size_t k = 0; k < ann.num_annotators(); ++k) {
    for (std::size_t p = 0; p < ann.num_pairs(); ++p) {
      const Pair& pr = ann.pairs.pairs[p];
      flipped += ann.annotator_ids[k] + "," + fx.items.ids[pr.j] + "," +
                 fx.items.ids[pr.i] + "," +
                 std::to_string(1 - ann.columns[k].bits[p]) + "\n";
    }
  }
  const auto flipped_path = dir + "/flipped.csv";
  write_file(flipped_path, flipped);
  CHECK(load_annotations_csv(flipped_path, fx.items) == ann);
}

TEST_CASE("annotation parsing rejects malformed rows") {
  const auto dir = fresh_dir("ann_err");
  const auto fx = crowdtest::fixture10();

  auto expect_parse_error = [&](const std::string& body, const std::string& frag) {
    const auto path = dir + "/case.csv";
    write_file(path, body);
    try {
      load_annotations_csv(path, fx.items);
      FAIL("expected a parse error for: " << frag);
    } catch (const ParseError& e) {
      CHECK(contains(e.what(), frag));
    }
  };

  expect_parse_error("who,item_i,item_j,pref\n", "annotator,item_i,item_j,pref");
  expect_parse_error("annotator,item_i,item_j,pref\na1,item0,ghost,1\n",
                     "unknown item id 'ghost'");
  expect_parse_error("annotator,item_i,item_j,pref\na1,item0,item0,1\n",
                     "compared against itself");
  expect_parse_error("annotator,item_i,item_j,pref\na1,item0,item1,2\n",
                     "preference must be 0 or 1");
  expect_parse_error(
      "annotator,item_i,item_j,pref\na1,item0,item1,1\na1,item1,item0,0\n",
      "duplicate vote by 'a1'");
}

TEST_CASE("uneven coverage is reported per annotator") {
  const auto dir = fresh_dir("ann_cov");
  const auto fx = crowdtest::fixture10();
  const auto path = dir + "/partial.csv";
  write_file(path,
             "annotator,item_i,item_j,pref\n"
             "a1,item0,item1,1\n"
             "a1,item0,item2,1\n"
             "a2,item0,item1,0\n");
  try {
    load_annotations_csv(path, fx.items);
    FAIL("expected an incomplete coverage error");
  } catch (const IncompleteAnnotation& e) {
    CHECK(contains(e.what(), "incomplete annotation coverage"));
    CHECK(contains(e.what(), "a2 missing 1 pair(s)"));
  }
}

TEST_CASE("labels round-trip against a pair index") {
  const auto dir = fresh_dir("labels_rt");
  const auto fx = crowdtest::fixture10();
  const auto pairs = build_pair_index(fx.items, &fx.quality);
  const auto truth = ground_truth_labels(pairs, fx.quality);
  const auto path = dir + "/labels.csv";
  save_labels_csv(path, truth, pairs, fx.items);
  CHECK(load_labels_csv(path, fx.items, pairs) == truth);

  // A label file over a different pair set is rejected.
  PairIndex fewer;
  fewer.pairs.assign(pairs.pairs.begin(), pairs.pairs.begin() + 10);
  CHECK_THROWS_AS(load_labels_csv(path, fx.items, fewer), InvalidInput);
}

TEST_CASE("scores round-trip and demand full coverage") {
  const auto dir = fresh_dir("scores_rt");
  const auto fx = crowdtest::fixture10();
  const auto path = dir + "/scores.csv";
  save_scores_csv(path, fx.items, fx.quality);
  CHECK(load_scores_csv(path, fx.items) == fx.quality);

  const auto partial = dir + "/partial.csv";
  write_file(partial, "id,score\nitem0,1\n");
  CHECK_THROWS_AS(load_scores_csv(partial, fx.items), InvalidInput);

  const auto dup = dir + "/dup.csv";
  write_file(dup, "id,score\nitem0,1\nitem0,2\n");
  CHECK_THROWS_AS(load_scores_csv(dup, fx.items), ParseError);
}

TEST_CASE("bundled fixture files match their generators byte for byte") {
  const auto dir = fresh_dir("fixture_regen");
  const auto fx = crowdtest::fixture10();
  const auto ann = crowdtest::fixture10_annotations(fx.items);

  const auto items_path = dir + "/items.csv";
  save_items_csv(items_path, fx.items);
  CHECK(read_file(items_path) == read_file(fixture_dir() + "/fixture10_items.csv"));

  const auto ann_path = dir + "/ann.csv";
  save_annotations_csv(ann_path, ann, fx.items);
  CHECK(read_file(ann_path) ==
        read_file(fixture_dir() + "/fixture10_annotations.csv"));

  const auto scores_path = dir + "/scores.csv";
  save_scores_csv(scores_path, fx.items, fx.quality);
  CHECK(read_file(scores_path) ==
        read_file(fixture_dir() + "/fixture10_scores.csv"));
}

TEST_CASE("loaders ignore trailing blank lines and CR line endings") {
  const auto dir = fresh_dir("crlf");
  const auto path = dir + "/items.csv";
  write_file(path, "id,f1\r\na,1\r\nb,2\r\n\r\n\r\n");
  const auto items = load_items_csv(path);
  REQUIRE(items.size() == 2);
  CHECK(items.ids[1] == "b");
  CHECK(items.attrs[1][0] == 2.0);
}
