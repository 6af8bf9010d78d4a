#include "exclab/config.hpp"

#include <cstdio>

namespace exclab {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::config, path + ": " + what);
}

const Json& field(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path + "." + key, "missing");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

double number_in(const Json& j, const std::string& path, const char* key, double lo, double hi, bool open_lo,
                 bool open_hi) {
  const std::string p = path + "." + key;
  const double v = number(field(j, path, key), p);
  const bool ok = (open_lo ? v > lo : v >= lo) && (open_hi ? v < hi : v <= hi);
  if (!ok) {
    bad(p, "value " + Json(v).dump() + " outside " + (open_lo ? "(" : "[") + Json(lo).dump() + ", " + Json(hi).dump() +
               (open_hi ? ")" : "]"));
  }
  return v;
}

template <class T>
T optional(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

std::pair<double, double> angle_pair(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) bad(path, "expected a pair of angles");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

}  // namespace

Json to_json(const ProcessSpec& spec) {
  if (spec.kind == ProcessSpec::Kind::poisson) return {{"kind", "poisson"}, {"rho_min", spec.rho_min}};
  Json pairs = Json::array();
  for (auto [a, b] : spec.angles) pairs.push_back({a, b});
  return {{"kind", "fixed"}, {"pairs", pairs}};
}

Json to_json(const ExcursionOptions& opt) {
  return {{"dt", opt.dt},
          {"refine", opt.refine},
          {"refine_kappa", opt.refine_kappa},
          {"refine_floor", opt.refine_floor},
          {"accelerate", opt.accelerate},
          {"kappa", opt.kappa},
          {"stop_bound", opt.stop_bound},
          {"max_steps", opt.max_steps}};
}

Json to_json(const EventSpec& spec) {
  Json chords = Json::array();
  for (const ChordSpec& c : spec.chords) chords.push_back({c.angle_a, c.angle_b});
  return {{"process", to_json(spec.process)},
          {"delta", spec.delta},
          {"tubes", {{"chords", chords}, {"eps", spec.eps}}},
          {"sampler", to_json(spec.sampler)},
          {"sausage_r", spec.sausage_r}};
}

Json to_json(const McEstimate& est) {
  return {{"mean", est.mean},
          {"stderr", est.std_error},
          {"n_samples", est.n_samples},
          {"hits", est.hits},
          {"master_seed", est.master_seed},
          {"config_digest", est.config_digest}};
}

Json to_json(const ChordDiagram& d) {
  Json chords = Json::array();
  for (auto [u, v] : d.chords) chords.push_back({u, v});
  return {{"angles", d.angles}, {"chords", chords}};
}

ProcessSpec process_from_json(const Json& j, const std::string& path) {
  ProcessSpec spec;
  const Json& kind = field(j, path, "kind");
  if (kind == "poisson") {
    spec.kind = ProcessSpec::Kind::poisson;
    spec.rho_min = number_in(j, path, "rho_min", 0.0, 2.0, true, true);
  } else if (kind == "fixed") {
    spec.kind = ProcessSpec::Kind::fixed;
    const Json& pairs = field(j, path, "pairs");
    if (!pairs.is_array()) bad(path + ".pairs", "expected an array");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string p = path + ".pairs[" + std::to_string(i) + "]";
      const auto ab = angle_pair(pairs[i], p);
      if (std::abs(unit(ab.first) - unit(ab.second)) < 1e-12) bad(p, "coincident angles");
      spec.angles.push_back(ab);
    }
  } else {
    bad(path + ".kind", "expected \"fixed\" or \"poisson\"");
  }
  return spec;
}

ExcursionOptions sampler_from_json(const Json& j, const std::string& path) {
  ExcursionOptions opt = EventSpec::default_event_sampler();
  if (j.is_null()) return opt;
  if (!j.is_object()) bad(path, "expected an object");
  try {
    if (j.contains("dt")) opt.dt = number_in(j, path, "dt", 0.0, 1e-2, true, false);
    if (j.contains("refine_kappa")) opt.refine_kappa = number_in(j, path, "refine_kappa", 0.0, 1.0, true, false);
    if (j.contains("refine_floor")) opt.refine_floor = number_in(j, path, "refine_floor", 0.0, 1.0, true, false);
    if (j.contains("kappa")) opt.kappa = number_in(j, path, "kappa", 0.0, 1.0, true, false);
    if (j.contains("stop_bound")) opt.stop_bound = number_in(j, path, "stop_bound", 0.0, 1e-2, true, false);
    opt.refine = optional(j, "refine", opt.refine);
    opt.accelerate = optional(j, "accelerate", opt.accelerate);
    opt.max_steps = optional(j, "max_steps", opt.max_steps);
  } catch (const Json::exception& e) {
    bad(path, e.what());
  }
  return opt;
}

EventSpec event_from_json(const Json& j, const std::string& path) {
  EventSpec spec;
  spec.process = process_from_json(field(j, path, "process"), path + ".process");
  spec.delta = number_in(j, path, "delta", 0.0, 1.0, true, true);
  const Json& tubes = field(j, path, "tubes");
  const std::string tp = path + ".tubes";
  const Json& chords = field(tubes, tp, "chords");
  if (!chords.is_array() || chords.empty()) bad(tp + ".chords", "expected a non-empty array");
  for (std::size_t i = 0; i < chords.size(); ++i) {
    const auto ab = angle_pair(chords[i], tp + ".chords[" + std::to_string(i) + "]");
    spec.chords.push_back({ab.first, ab.second});
  }
  if (tubes.contains("eps")) spec.eps = number_in(tubes, tp, "eps", 0.0, 2.0, true, true);
  spec.sampler = sampler_from_json(j.contains("sampler") ? j.at("sampler") : Json(), path + ".sampler");
  if (j.contains("sausage_r")) spec.sausage_r = number_in(j, path, "sausage_r", 0.0, 1.0, true, false);
  return spec;
}

ChordDiagram diagram_from_json(const Json& j, const std::string& path) {
  ChordDiagram d;
  const Json& angles = field(j, path, "angles");
  if (!angles.is_array()) bad(path + ".angles", "expected an array");
  for (std::size_t i = 0; i < angles.size(); ++i) d.angles.push_back(number(angles[i], path + ".angles[" + std::to_string(i) + "]"));
  const Json& chords = field(j, path, "chords");
  if (!chords.is_array()) bad(path + ".chords", "expected an array");
  for (std::size_t i = 0; i < chords.size(); ++i) {
    const std::string p = path + ".chords[" + std::to_string(i) + "]";
    if (!chords[i].is_array() || chords[i].size() != 2 || !chords[i][0].is_number_integer() ||
        !chords[i][1].is_number_integer()) {
      bad(p, "expected a pair of point indices");
    }
    d.chords.emplace_back(chords[i][0].get<int>(), chords[i][1].get<int>());
  }
  try {
    validate(d);
  } catch (const Error& e) {
    bad(path, e.what());
  }
  return d;
}

const Json& require_field(const Json& j, const std::string& path, const char* key) { return field(j, path, key); }

double number_field(const Json& j, const std::string& path, const char* key, double lo, double hi) {
  return number_in(j, path, key, lo, hi, true, true);
}

std::uint64_t count_field(const Json& j, const std::string& path, const char* key, std::uint64_t min) {
  const Json& v = field(j, path, key);
  const std::string p = path + "." + key;
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) bad(p, "expected a non-negative integer");
  const auto n = v.get<std::uint64_t>();
  if (n < min) bad(p, "expected at least " + std::to_string(min));
  return n;
}

std::vector<double> eps_grid_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array");
  std::vector<double> grid;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const double e = number(j[i], p);
    if (!(e > 0.0 && e < 2.0)) bad(p, "value " + Json(e).dump() + " outside (0, 2)");
    if (!grid.empty() && e >= grid.back()) bad(p, "grid must be strictly decreasing");
    grid.push_back(e);
  }
  return grid;
}

McParams mc_from_json(const Json& j, const std::string& path) {
  McParams mc;
  mc.n = count_field(j, path, "n", 1);
  mc.seed = count_field(j, path, "seed", 0);
  return mc;
}

std::string digest_of(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_digest(const EventSpec& spec) { return digest_of(to_json(spec)); }

}  // namespace exclab
