#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "keraia/knowledge_base.hpp"

namespace keraia {

enum class FnType { Augmentation, Calculation, Inference, Classification, Prediction, PatternRecognition };

std::string_view to_string(FnType type);
// Throws InvalidTransformation for names outside the six kinds.
FnType parse_fn_type(std::string_view name);

struct FnOutput {
  SlotValue slots = SlotValue::map();
  std::string note;  // appended to the output's explains text
};

struct TransformationFn {
  std::string name;
  FnType type = FnType::Calculation;
  std::vector<std::string> inputs;  // slot paths read from the source KS
  std::string output_name;          // appellation of the produced KS
  std::function<FnOutput(const SlotMap& inputs)> body;
};

class TransformationRegistry {
 public:
  void add(TransformationFn fn);
  void add(std::string name, std::string_view type, std::vector<std::string> inputs, std::string output_name,
           std::function<FnOutput(const SlotMap&)> body);
  const TransformationFn* find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, TransformationFn, std::less<>> fns_;
};

// Detailed_Dimension_Mapping, Mass_Estimation, Capability_Inference,
// Operational_Role_Identification, Predictive_Trajectory_Modeling and
// Behavioral_Pattern_Recognition. Every constant they use is read from the
// source KS.
const TransformationRegistry& builtin_transformations();

struct ElaborationResult {
  std::string target_cloud;
  std::vector<std::string> outputs;
  std::vector<FunctionLogEntry> log;
};

// Creates `plan.target_cloud` (top level) holding one output KS per pair.
// Inputs may be inherited through DRels. Throws MissingInput, OutputCollision.
ElaborationResult elaborate(KnowledgeBase& kb, const ElaborationPlan& plan,
                            const TransformationRegistry& registry = builtin_transformations(), Tick clock = 0);

// Re-runs a logged function on its recorded inputs.
SlotMap replay(const FunctionLogEntry& entry, const TransformationRegistry& registry = builtin_transformations());

}  // namespace keraia
