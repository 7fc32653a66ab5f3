#include "keraia/elaboration.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "keraia/drel.hpp"
#include "keraia/error.hpp"

namespace keraia {

namespace {

const SlotValue& input(const SlotMap& in, std::string_view name) {
  for (const auto& e : in) {
    if (e.name == name) return e.value;
  }
  throw Error(ErrorCode::MissingInput, std::string(name));
}

double num(const SlotMap& in, std::string_view name) {
  const SlotValue& v = input(in, name);
  if (!v.is_number()) throw Error(ErrorCode::NonNumericValue, std::string(name) + " = " + render(v));
  return v.number();
}

std::vector<double> vec(const SlotValue& v, std::string_view name) {
  std::vector<double> out;
  if (!v.is_list()) throw Error(ErrorCode::TypeMismatch, std::string(name) + " must be a numeric list");
  for (const auto& x : v.list()) {
    if (!x.is_number()) throw Error(ErrorCode::NonNumericValue, std::string(name) + " element " + render(x));
    out.push_back(x.number());
  }
  return out;
}

SlotValue number_list(const std::vector<double>& xs) {
  SlotList out;
  for (double x : xs) out.emplace_back(x);
  return SlotValue(std::move(out));
}

std::vector<std::string> capabilities_for(const SlotMap& in) {
  std::string cls = std::string(input(in, "class").symbol().value_or(""));
  const SlotValue* caps = input(in, "capability_table").find(cls);
  std::vector<std::string> out;
  if (!caps) return out;
  if (!caps->is_list()) throw Error(ErrorCode::TypeMismatch, "capability_table/" + cls + " must be a list");
  for (const auto& c : caps->list()) out.emplace_back(c.symbol().value_or(render(c)));
  return out;
}

SlotValue text_list(const std::vector<std::string>& xs) {
  SlotList out;
  for (const auto& x : xs) out.emplace_back(x);
  return SlotValue(std::move(out));
}

double wrap_degrees(double d) {
  d = std::fmod(d + 180.0, 360.0);
  if (d < 0) d += 360.0;
  return d - 180.0;
}

TransformationRegistry make_builtins() {
  TransformationRegistry r;
  r.add("Detailed_Dimension_Mapping", "Augmentation", {"overall_length", "aspect_ratios/width", "aspect_ratios/height"},
        "Dimensional_Profiles", [](const SlotMap& in) {
          double l = num(in, "overall_length");
          double w = l * num(in, "aspect_ratios/width");
          double h = l * num(in, "aspect_ratios/height");
          FnOutput out;
          out.slots.put("length", SlotValue(l, input(in, "overall_length").unit()));
          out.slots.put("width", SlotValue(w, input(in, "overall_length").unit()));
          out.slots.put("height", SlotValue(h, input(in, "overall_length").unit()));
          out.slots.put("volume", SlotValue(l * w * h));
          return out;
        });
  r.add("Mass_Estimation", "Calculation", {"volume", "density"}, "Mass_Profiles", [](const SlotMap& in) {
    FnOutput out;
    out.slots.put("mass", SlotValue(num(in, "volume") * num(in, "density"), "kg"));
    return out;
  });
  r.add("Capability_Inference", "Inference", {"class", "capability_table"}, "Capability_Profiles",
        [](const SlotMap& in) {
          FnOutput out;
          auto caps = capabilities_for(in);
          out.slots.put("class", input(in, "class"));
          out.slots.put("capabilities", text_list(caps));
          if (!input(in, "capability_table").find(std::string(input(in, "class").symbol().value_or("")))) {
            out.note = "unknown class";
          }
          return out;
        });
  r.add("Operational_Role_Identification", "Classification", {"class", "capability_table", "role_rules"},
        "Operational_Roles", [](const SlotMap& in) {
          auto caps = capabilities_for(in);
          std::string role = "unclassified";
          const SlotValue& rules = input(in, "role_rules");
          if (!rules.is_list()) throw Error(ErrorCode::TypeMismatch, "role_rules must be a list");
          for (const auto& rule : rules.list()) {
            const SlotValue* name = rule.find("role");
            const SlotValue* requires_ = rule.find("requires");
            if (!name || !requires_ || !requires_->is_list()) {
              throw Error(ErrorCode::TypeMismatch, "role rule needs role and requires list");
            }
            bool all = std::all_of(requires_->list().begin(), requires_->list().end(), [&](const SlotValue& c) {
              auto s = c.symbol();
              return s && std::find(caps.begin(), caps.end(), *s) != caps.end();
            });
            if (all) {
              role = std::string(name->symbol().value_or(""));
              break;
            }
          }
          FnOutput out;
          out.slots.put("role", SlotValue(role));
          out.slots.put("capabilities", text_list(caps));
          return out;
        });
  r.add("Predictive_Trajectory_Modeling", "Prediction", {"position", "velocity", "horizon", "drift"},
        "Predictive_Trajectories", [](const SlotMap& in) {
          auto p = vec(input(in, "position"), "position");
          auto v = vec(input(in, "velocity"), "velocity");
          auto d = vec(input(in, "drift"), "drift");
          double dt = num(in, "horizon");
          if (p.size() != v.size() || p.size() != d.size()) {
            throw Error(ErrorCode::TypeMismatch, "position, velocity and drift dimensions differ");
          }
          std::vector<double> q(p.size());
          for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[i] + v[i] * dt + d[i];
          FnOutput out;
          out.slots.put("predicted_position", number_list(q));
          out.slots.put("horizon", SlotValue(dt));
          return out;
        });
  r.add("Behavioral_Pattern_Recognition", "PatternRecognition",
        {"heading_history", "pattern_thresholds/straight_max", "pattern_thresholds/zigzag_min",
         "pattern_thresholds/closing_min"},
        "Behavioral_Insights", [](const SlotMap& in) {
          auto hs = vec(input(in, "heading_history"), "heading_history");
          double straight_max = num(in, "pattern_thresholds/straight_max");
          double zigzag_min = num(in, "pattern_thresholds/zigzag_min");
          double closing_min = num(in, "pattern_thresholds/closing_min");
          std::vector<double> turns;
          for (std::size_t i = 1; i < hs.size(); ++i) turns.push_back(wrap_degrees(hs[i] - hs[i - 1]));
          double max_abs = 0, total = 0;
          std::size_t reversals = 0;
          for (std::size_t i = 0; i < turns.size(); ++i) {
            max_abs = std::max(max_abs, std::fabs(turns[i]));
            total += turns[i];
            if (i > 0 && turns[i] * turns[i - 1] < 0) ++reversals;
          }
          std::string pattern;
          if (max_abs <= straight_max) pattern = "straight-run";
          else if (reversals >= 2 && max_abs >= zigzag_min) pattern = "zigzag";
          else if (reversals == 0 && std::fabs(total) >= closing_min) pattern = "closing-course";
          else pattern = "irregular";
          FnOutput out;
          out.slots.put("pattern", SlotValue(pattern));
          out.slots.put("max_heading_change", SlotValue(max_abs, "deg"));
          out.slots.put("net_heading_change", SlotValue(total, "deg"));
          return out;
        });
  return r;
}

}  // namespace

std::string_view to_string(FnType type) {
  switch (type) {
    case FnType::Augmentation: return "Augmentation";
    case FnType::Calculation: return "Calculation";
    case FnType::Inference: return "Inference";
    case FnType::Classification: return "Classification";
    case FnType::Prediction: return "Prediction";
    case FnType::PatternRecognition: return "PatternRecognition";
  }
  return "?";
}

FnType parse_fn_type(std::string_view name) {
  for (FnType t : {FnType::Augmentation, FnType::Calculation, FnType::Inference, FnType::Classification,
                   FnType::Prediction, FnType::PatternRecognition}) {
    if (to_string(t) == name) return t;
  }
  throw Error(ErrorCode::InvalidTransformation, "unknown function type '" + std::string(name) + "'");
}

void TransformationRegistry::add(TransformationFn fn) {
  if (fn.name.empty() || fn.output_name.empty() || !fn.body) {
    throw Error(ErrorCode::InvalidTransformation, "transformation needs a name, an output name and a body");
  }
  auto name = fn.name;
  fns_[name] = std::move(fn);
}

void TransformationRegistry::add(std::string name, std::string_view type, std::vector<std::string> inputs,
                                 std::string output_name, std::function<FnOutput(const SlotMap&)> body) {
  add(TransformationFn{std::move(name), parse_fn_type(type), std::move(inputs), std::move(output_name), std::move(body)});
}

const TransformationFn* TransformationRegistry::find(std::string_view name) const {
  auto it = fns_.find(name);
  return it == fns_.end() ? nullptr : &it->second;
}

std::vector<std::string> TransformationRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : fns_) out.push_back(k);
  return out;
}

const TransformationRegistry& builtin_transformations() {
  static const TransformationRegistry registry = make_builtins();
  return registry;
}

ElaborationResult elaborate(KnowledgeBase& kb, const ElaborationPlan& plan, const TransformationRegistry& registry,
                            Tick clock) {
  const Cloud& source = kb.cloud(plan.source_cloud);
  if (kb.find_cloud(plan.target_cloud) || kb.find_ks(plan.target_cloud)) {
    throw Error(ErrorCode::OutputCollision, "target '" + plan.target_cloud + "' already exists");
  }
  auto members = kb.members_within(source.appellation);

  // Compute everything first so a failure leaves the knowledge base untouched.
  struct Pending {
    KnowledgeSource ks;
    FunctionLogEntry log;
  };
  std::vector<Pending> pending;
  std::set<std::string> names;
  for (const auto& [ks_name, fn_name] : plan.pairs) {
    if (std::find(members.begin(), members.end(), ks_name) == members.end()) {
      throw Error(ErrorCode::UnknownKS, ks_name + " is not in cloud " + plan.source_cloud);
    }
    const TransformationFn* fn = registry.find(fn_name);
    if (!fn) throw Error(ErrorCode::InvalidTransformation, "unknown function '" + fn_name + "'");
    if (!names.insert(fn->output_name).second || kb.find_ks(fn->output_name) || kb.find_cloud(fn->output_name)) {
      throw Error(ErrorCode::OutputCollision, "output '" + fn->output_name + "' already exists");
    }
    SlotMap inputs;
    for (const auto& path : fn->inputs) {
      auto r = try_resolve_attribute(kb, ks_name, split_path(path), clock);
      if (!r) throw Error(ErrorCode::MissingInput, ks_name + "/" + path + " (needed by " + fn_name + ")");
      inputs.push_back(SlotEntry{path, r->value});
    }
    FnOutput out = fn->body(inputs);
    KnowledgeSource ks;
    ks.appellation = fn->output_name;
    ks.slots = out.slots;
    std::string used;
    for (const auto& in : inputs) used += (used.empty() ? "" : ", ") + in.name;
    ks.explains = fn->name + " (" + std::string(to_string(fn->type)) + ") over " + ks_name + " using " + used +
                  (out.note.empty() ? "" : "; " + out.note);
    FunctionLogEntry log{fn->name, ks_name, fn->output_name, inputs, out.slots.entries(), clock};
    pending.push_back({std::move(ks), std::move(log)});
  }

  KnowledgeBase::ActorScope actor(kb, "elaborate:" + plan.name);
  ElaborationResult result;
  result.target_cloud = plan.target_cloud;
  kb.add_cloud(plan.target_cloud);
  for (auto& p : pending) {
    result.outputs.push_back(p.ks.appellation);
    kb.put_ks(std::move(p.ks), plan.target_cloud);
    kb.append_function_log(p.log);
    result.log.push_back(std::move(p.log));
  }
  return result;
}

SlotMap replay(const FunctionLogEntry& entry, const TransformationRegistry& registry) {
  const TransformationFn* fn = registry.find(entry.function);
  if (!fn) throw Error(ErrorCode::InvalidTransformation, "unknown function '" + entry.function + "'");
  return fn->body(entry.inputs).slots.entries();
}

}  // namespace keraia
