#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "circlab/models.hpp"

namespace circlab {

enum class ModelId { FlatHard, FlatVonMises, CommunityHard, CommunityVonMises };

std::string model_name(ModelId model);  // flat-hard, flat-vm, comm-hard, comm-vm
ModelId parse_model(const std::string& name);
bool is_community(ModelId model);

// Text form of a SignalKind: "hard:tau=<v>" or "vonmises:kappa=<v>".
std::string format_signal(const SignalKind& signal);
SignalKind parse_signal(const std::string& text);

struct Dataset {
  ModelId model = ModelId::FlatHard;
  int N = 0;  // N for flat models, n for community models
  int K = 0;
  std::optional<SignalKind> signal;
  std::optional<std::uint64_t> seed;
  std::variant<FlatSample, EdgeSample> data;
};

void write_dataset(std::ostream& out, const Dataset& dataset, bool reveal_truth);
// Throws FormatError on malformed input.
Dataset read_dataset(std::istream& in);

}  // namespace circlab
