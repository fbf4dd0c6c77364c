#pragma once

#include <string>
#include <variant>

#include "pt/beliefprop.hpp"
#include "pt/hmm.hpp"
#include "pt/kalman.hpp"
#include "pt/particle.hpp"
#include "pt/pcfg.hpp"

namespace pt {

// JSON (de)serialization for the model files the CLI consumes. All parsers
// throw DataError on malformed documents and run the model validators.

HmmModel hmm_from_json(const std::string& text);
std::string hmm_to_json(const HmmModel& model);

LinearGaussianModel linear_gaussian_from_json(const std::string& text);
std::string linear_gaussian_to_json(const LinearGaussianModel& model);

PairwiseModel pairwise_from_json(const std::string& text);
std::string pairwise_to_json(const PairwiseModel& model);

std::string beliefs_to_json(const PairwiseModel& model,
                            const BeliefPropResult& result);

Pcfg pcfg_from_json(const std::string& text);
std::string pcfg_to_json(const Pcfg& grammar);

// Tracking model file: either {"type": "clutter_tracker", ...} or
// {"type": "hmm", "model": {...}}.
using TrackerSpec = std::variant<ClutterTrackerSpec, HmmModel>;
TrackerSpec tracker_from_json(const std::string& text);
std::string tracker_to_json(const ClutterTrackerSpec& spec);

std::string load_text_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);

}  // namespace pt
