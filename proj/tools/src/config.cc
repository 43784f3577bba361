// Copyright 2026 The rpdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.h"

#include <array>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <type_traits>

#include "rpdp/errors.h"

namespace rpdp::cli {
namespace {

using nlohmann::json;

// A JSON object whose keys must all be consumed.
class Section {
 public:
  Section(const json& node, std::string path)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  const json* Find(const std::string& key) {
    const auto it = node_.find(key);
    if (it == node_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  std::string Path(const std::string& key) const { return path_ + "." + key; }

  template <typename T>
  void Get(const std::string& key, T& out) {
    if (const json* v = Find(key)) out = As<T>(*v, Path(key));
  }

  void Finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!used_.contains(key)) {
        throw ConfigError("unknown key " + Path(key));
      }
    }
  }

  template <typename T>
  static T As(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        throw ConfigError(where + " must be an integer");
      }
      if (std::is_unsigned_v<T> && !v.is_number_unsigned()) {
        throw ConfigError(where + " must be non-negative");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where + " must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + " must be a string");
    } else {
      if (!v.is_array()) throw ConfigError(where + " must be an array");
      T items;
      for (std::size_t i = 0; i < v.size(); ++i) {
        items.push_back(As<typename T::value_type>(
            v[i], where + "[" + std::to_string(i) + "]"));
      }
      return items;
    }
    return v.get<T>();
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename T>
std::array<T, 3> Triple(const std::vector<T>& v, const std::string& where) {
  if (v.size() != 3) throw ConfigError(where + " needs exactly 3 entries");
  return {v[0], v[1], v[2]};
}

void ParseMechanism(const json& node, MechanismParams& p) {
  Section s(node, "mechanism");
  s.Get("sigma", p.sigma);
  s.Get("clip", p.clip);
  s.Get("delta", p.delta);
  s.Get("tau", p.tau);
  s.Get("rounds", p.rounds);
  s.Get("client_prob", p.client_prob);
  const json* alpha_max = s.Find("alpha_max");
  const json* alpha_grid = s.Find("alpha_grid");
  if (alpha_max && alpha_grid) {
    throw ConfigError("mechanism: give alpha_max or alpha_grid, not both");
  }
  if (alpha_max) {
    const int last = Section::As<int>(*alpha_max, s.Path("alpha_max"));
    if (last < 2) throw DomainError("mechanism.alpha_max must be >= 2");
    p.alpha_grid = AlphaRange(2, last);
  }
  if (alpha_grid) {
    p.alpha_grid =
        Section::As<std::vector<int>>(*alpha_grid, s.Path("alpha_grid"));
  }
  std::string threat;
  s.Get("threat", threat);
  if (threat == "server") {
    p.threat = ThreatModel::kServer;
  } else if (threat == "client") {
    p.threat = ThreatModel::kClientOrThirdParty;
  } else if (!threat.empty()) {
    throw ConfigError("mechanism.threat must be \"server\" or \"client\"");
  }
  s.Finish();
  p.Validate();
}

std::optional<DistSpec> ParseBudgets(const json& node) {
  Section s(node, "budgets");
  std::string kind;
  s.Get("kind", kind);
  std::optional<DistSpec> spec;
  if (kind == "three_levels") {
    ThreeLevels t;
    if (const json* j = s.Find("levels")) {
      t.levels = Triple(Section::As<std::vector<double>>(*j, "levels"),
                        s.Path("levels"));
    }
    if (const json* j = s.Find("weights")) {
      t.weights = Triple(Section::As<std::vector<double>>(*j, "weights"),
                         s.Path("weights"));
    }
    spec = t;
  } else if (kind == "bounded_pareto") {
    BoundedPareto b;
    s.Get("shape", b.shape);
    s.Get("lower", b.lower);
    s.Get("upper", b.upper);
    spec = b;
  } else if (kind == "bounded_mix_gauss") {
    BoundedMixGauss b;
    if (const json* j = s.Find("means")) {
      b.means = Triple(Section::As<std::vector<double>>(*j, "means"),
                       s.Path("means"));
    }
    if (const json* j = s.Find("spreads")) {
      b.spreads = Triple(Section::As<std::vector<double>>(*j, "spreads"),
                         s.Path("spreads"));
    }
    if (const json* j = s.Find("weights")) {
      b.weights = Triple(Section::As<std::vector<double>>(*j, "weights"),
                         s.Path("weights"));
    }
    s.Get("lower", b.lower);
    s.Get("upper", b.upper);
    s.Get("spread_is_variance", b.spread_is_variance);
    spec = b;
  } else if (kind == "per_label") {
    PerLabel p;
    const json* m = s.Find("mapping");
    if (!m || !m->is_object()) {
      throw ConfigError("budgets.mapping must map labels to budgets");
    }
    for (const auto& [label, value] : m->items()) {
      int key = 0;
      std::istringstream in(label);
      if (!(in >> key) || !in.eof()) {
        throw ConfigError("budgets.mapping key '" + label +
                          "' is not an integer label");
      }
      p.mapping[key] = Section::As<double>(value, "budgets.mapping." + label);
    }
    spec = p;
  } else if (kind != "csv") {
    throw ConfigError(
        "budgets.kind must be one of three_levels, "
        "bounded_pareto, bounded_mix_gauss, per_label, csv");
  }
  s.Finish();
  if (spec) ValidateDistSpec(*spec);
  return spec;
}

void ParseDataset(const json& node, DatasetSpec& d) {
  Section s(node, "dataset");
  std::string kind = "synthetic";
  s.Get("kind", kind);
  double train_fraction = kDefaultTrainFraction;
  s.Get("train_fraction", train_fraction);
  if (kind == "synthetic") {
    d.kind = DatasetSpec::Kind::kSynthetic;
    s.Get("clients", d.synthetic.clients);
    s.Get("records_per_client", d.synthetic.records_per_client);
    s.Get("features", d.synthetic.features);
    s.Get("classes", d.synthetic.classes);
    s.Get("separation", d.synthetic.separation);
    d.synthetic.train_fraction = train_fraction;
    std::string partition;
    s.Get("partition", partition);
    if (partition == "iid") {
      d.partition = PartitionMode::kIid;
    } else if (partition == "non_iid") {
      d.partition = PartitionMode::kNonIid;
    } else if (!partition.empty()) {
      throw ConfigError("dataset.partition must be \"iid\" or \"non_iid\"");
    }
  } else if (kind == "csv") {
    d.kind = DatasetSpec::Kind::kCsv;
    s.Get("paths", d.paths);
    s.Get("label_column", d.label_column);
    s.Get("split_seed", d.split_seed);
    if (d.paths.empty()) throw ConfigError("dataset.paths is empty");
    d.synthetic.train_fraction = train_fraction;
  } else {
    throw ConfigError("dataset.kind must be \"synthetic\" or \"csv\"");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("dataset.train_fraction must lie in (0, 1)");
  }
  s.Finish();
}

void ParseRun(const json& node, RunSpec& r) {
  Section s(node, "run");
  if (const json* j = s.Find("modes")) {
    r.modes.clear();
    for (const std::string& name :
         Section::As<std::vector<std::string>>(*j, s.Path("modes"))) {
      r.modes.push_back(ParseTrainingMode(name));
    }
    if (r.modes.empty()) throw ConfigError("run.modes is empty");
  }
  s.Get("seeds", r.seeds);
  if (r.seeds.empty()) throw ConfigError("run.seeds is empty");
  s.Get("learning_rate", r.learning_rate);
  s.Get("eval_every", r.eval_every);
  s.Get("threads", r.threads);
  s.Get("ledger_snapshots", r.ledger_snapshots);
  if (!(r.learning_rate > 0.0)) {
    throw DomainError("run.learning_rate must be > 0");
  }
  if (r.eval_every < 1) throw DomainError("run.eval_every must be >= 1");
  if (r.threads < 1) throw DomainError("run.threads must be >= 1");
  s.Finish();
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig config;
  Section s(root, "config");
  if (const json* j = s.Find("mechanism")) ParseMechanism(*j, config.mechanism);
  if (const json* j = s.Find("curves")) {
    Section c(*j, "curves");
    c.Get("q_values", config.curves.q_values);
    c.Get("sigmas", config.curves.sigmas);
    c.Finish();
  }
  if (const json* j = s.Find("fit")) {
    Section f(*j, "fit");
    f.Get("q_grid", config.fit.q_grid);
    f.Get("observations_csv", config.fit.observations_csv);
    f.Finish();
  }
  if (const json* j = s.Find("budgets")) config.budgets = ParseBudgets(*j);
  if (const json* j = s.Find("dataset")) ParseDataset(*j, config.dataset);
  if (const json* j = s.Find("run")) ParseRun(*j, config.run);
  s.Get("output_dir", config.output_dir);
  s.Finish();
  for (double q : config.curves.q_values) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw DomainError("curves.q_values must lie in [0, 1]");
    }
  }
  for (double sigma : config.curves.sigmas) {
    if (!(sigma > 0.0)) throw DomainError("curves.sigmas must be > 0");
  }
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

}  // namespace rpdp::cli
