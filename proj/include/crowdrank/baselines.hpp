#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crowdrank/ranker.hpp"
#include "crowdrank/types.hpp"

namespace crowdrank {

// Strict majority per pair; exact ties are resolved by a seeded coin,
// one draw per tied pair indexed by pair position.
LabelColumn majority_vote(const AnnotationSet& annotations, std::uint64_t seed);

struct IamModel {
  std::vector<std::string> annotator_ids;
  std::vector<RankerWeights> rankers;
};

// One ranker per annotator, trained on that annotator's labels.
IamModel iam_train(const AnnotationSet& annotations, const ItemTable& items,
                   const TrainConfig& config);

// Bit 1 iff the summed scores rank item i above item j; exact score
// equality resolves to 0.
LabelColumn iam_fuse(const IamModel& model, const ItemTable& items,
                     const PairIndex& pairs);

}  // namespace crowdrank
