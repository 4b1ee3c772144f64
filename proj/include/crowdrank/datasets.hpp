#pragma once

#include <string>
#include <vector>

#include "crowdrank/types.hpp"

namespace crowdrank {

// Comma-separated, header `id,f1,...,fd`.
ItemTable load_items_csv(const std::string& path);
void save_items_csv(const std::string& path, const ItemTable& items);

struct WineTable {
  ItemTable items;  // ids are row ordinals "0", "1", ...
  std::vector<double> quality;
  std::vector<std::string> feature_names;
};

// UCI wine format: semicolon-separated, quoted headers, one score column
// (default "quality"). Feature columns are everything else.
WineTable load_wine_csv(const std::string& path,
                        const std::string& score_column = "quality");
void save_wine_csv(const std::string& path, const WineTable& wine,
                   const std::string& score_column = "quality");

// Header `annotator,item_i,item_j,pref`. Rows may use either orientation;
// they are canonicalized to item-table order on load. Every annotator must
// cover the same pair set exactly once.
AnnotationSet load_annotations_csv(const std::string& path, const ItemTable& items);
void save_annotations_csv(const std::string& path, const AnnotationSet& annotations,
                          const ItemTable& items);

// Header `item_i,item_j,pref` in PairIndex order.
void save_labels_csv(const std::string& path, const LabelColumn& labels,
                     const PairIndex& pairs, const ItemTable& items);
LabelColumn load_labels_csv(const std::string& path, const ItemTable& items,
                            const PairIndex& expected_pairs);

// `id,score` two-column CSV aligned against the item table.
std::vector<double> load_scores_csv(const std::string& path, const ItemTable& items);
void save_scores_csv(const std::string& path, const ItemTable& items,
                     const std::vector<double>& scores);

}  // namespace crowdrank
