#pragma once

#include <string>

#include "crowdrank/baselines.hpp"
#include "crowdrank/jam.hpp"
#include "crowdrank/vrjam.hpp"

namespace crowdrank {

std::string to_json_string(const RankerWeights& weights);
std::string to_json_string(const IamModel& model);
std::string to_json_string(const JamModel& model);
std::string to_json_string(const VrjamModel& model);

RankerWeights ranker_weights_from_json(const std::string& text);
JamModel jam_model_from_json(const std::string& text);
VrjamModel vrjam_model_from_json(const std::string& text);

// Region noise spec file: {"centroids": [[...]], "B": [[...]]}.
struct RegionSpec {
  ClusterModel regions;
  Matrix B;
};
RegionSpec region_spec_from_json(const std::string& text);
std::string to_json_string(const RegionSpec& spec);

}  // namespace crowdrank
