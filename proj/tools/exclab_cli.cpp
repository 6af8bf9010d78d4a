#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "exclab/chords.hpp"
#include "exclab/config.hpp"
#include "exclab/kernel_checks.hpp"
#include "exclab/mc.hpp"
#include "exclab/process.hpp"
#include "exclab/tube.hpp"

namespace fs = std::filesystem;
using namespace exclab;

namespace {

constexpr int kExitError = 1;
constexpr int kExitVerdictFail = 3;

struct Options {
  std::string config;
  std::string out = ".";
  int workers = 0;
  std::optional<std::uint64_t> seed_override;
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json load_config(const Options& opt) {
  std::ifstream in(opt.config);
  if (!in) throw Error(ErrorCode::config, "cannot read config file " + opt.config);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::config, opt.config + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::config, "config: expected an object");
  if (opt.seed_override) {
    if (!j.contains("mc")) throw Error(ErrorCode::config, "config.mc: missing (needed for --seed-override)");
    j["mc"]["seed"] = *opt.seed_override;
  }
  return j;
}

class Reporter {
 public:
  Reporter(const Options& opt, std::string command, const Json& config)
      : dir_(opt.out), command_(std::move(command)), config_(config) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw Error(ErrorCode::config, "--out: cannot create directory " + dir_.string());
  }

  fs::path path(const std::string& suffix) const { return dir_ / (command_ + suffix); }

  void write_report(const Json& result, bool verdict_pass = true, bool has_verdict = false) const {
    Json rep = {{"schema_version", kSchemaVersion},
                {"command", command_},
                {"timestamp", timestamp()},
                {"config_digest", digest_of(config_)},
                {"config", config_},
                {"result", result}};
    if (has_verdict) rep["verdict"] = verdict_pass ? "pass" : "fail";
    write(path(".json"), rep.dump(2) + "\n");
  }

  void write_lines(const std::vector<Json>& records) const {
    std::string text;
    for (Json r : records) {
      r["schema_version"] = kSchemaVersion;
      text += r.dump() + "\n";
    }
    write(path(".jsonl"), text);
  }

  void write_csv(const std::string& text, const std::string& suffix = ".csv") const { write(path(suffix), text); }

 private:
  static void write(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
    if (!f) throw Error(ErrorCode::config, "--out: cannot write " + p.string());
  }

  fs::path dir_;
  std::string command_;
  Json config_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double chord_length(const EventSpec& s, const ChordSpec& c) {
  return std::abs(std::polar(1.0 - s.delta, c.angle_a) - std::polar(1.0 - s.delta, c.angle_b));
}

EventSpec experiment(const Json& cfg) { return event_from_json(require_field(cfg, "config", "experiment"), "config.experiment"); }
McParams mc(const Json& cfg) { return mc_from_json(require_field(cfg, "config", "mc"), "config.mc"); }

// Commands return the process exit status.

int kernels_verify(const Options& opt) {
  const Json cfg = load_config(opt);
  double tol = 1e-8;
  if (cfg.contains("kernels") && cfg["kernels"].contains("tolerance")) {
    tol = number_field(cfg["kernels"], "config.kernels", "tolerance", 0.0, 1.0);
  }
  std::optional<McParams> walks;
  if (cfg.contains("mc")) walks = mc(cfg);
  Reporter rep(opt, "kernels-verify", cfg);

  std::vector<InvariantCheck> checks = disk_kernel_suite(tol);
  for (const auto& c : rect_kernel_suite()) checks.push_back(c);
  if (walks) {
    for (const auto& c : wos_oracle_suite(walks->n, walks->seed, opt.workers)) checks.push_back(c);
  }
  Json list = Json::array();
  std::string csv = "check,max_error,tolerance,pass\n";
  bool pass = true;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"max_error", c.max_error}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
    csv += "\"" + c.name + "\"," + num(c.max_error) + "," + num(c.tolerance) + "," + (c.pass() ? "1" : "0") + "\n";
    pass = pass && c.pass();
  }
  rep.write_report({{"checks", list}}, pass, true);
  rep.write_csv(csv);
  return pass ? 0 : kExitVerdictFail;
}

int sample(const Options& opt) {
  const Json cfg = load_config(opt);
  const EventSpec spec = experiment(cfg);
  const McParams p = mc(cfg);
  const std::uint64_t replica = cfg.contains("replica") ? count_field(cfg, "config", "replica", 0) : 0;
  const TubeSystem system = make_system(spec);
  Reporter rep(opt, "sample", cfg);

  Rng prng = pair_stream(p.seed, replica);
  const EndpointPairSet pairs = draw_pairs(spec.process, prng);
  ExcursionOptions so = spec.sampler;
  so.target_radius = system.radius();
  const ExcursionProcessSample s = sample_process(pairs, so, p.seed, replica);
  const EventReport ev = evaluate_event(s.paths(), system, {spec.sausage_r, true});

  Json paths = Json::array();
  std::string csv = "path,index,x,y\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    const PolyPath& path = s.paths()[k];
    paths.push_back({{"x", {pairs[k].x.real(), pairs[k].x.imag()}},
                     {"y", {pairs[k].y.real(), pairs[k].y.imag()}},
                     {"points", path.points.size()},
                     {"tail_jump", path.tail_jump}});
    for (std::size_t i = 0; i < path.points.size(); ++i) {
      csv += std::to_string(k) + "," + std::to_string(i) + "," + num(path.points[i].real()) + "," +
             num(path.points[i].imag()) + "\n";
    }
  }
  rep.write_report({{"replica", replica},
                    {"paths", paths},
                    {"event",
                     {{"containment", ev.containment},
                      {"crossings", ev.crossings},
                      {"excursions_hitting", ev.excursions_hitting},
                      {"crossing_form", ev.event_crossing_form},
                      {"topological_form", ev.event_topological_form}}}});
  rep.write_csv(csv, "_paths.csv");
  return 0;
}

int hitpairs(const Options& opt) {
  const Json cfg = load_config(opt);
  const std::string path = "config.hitpairs";
  const Json& h = require_field(cfg, "config", "hitpairs");
  const double xa = number_field(h, path, "x_angle", -1e3, 1e3);
  const double ya = number_field(h, path, "y_angle", -1e3, 1e3);
  const double delta = number_field(h, path, "delta", 0.0, 1.0);
  const int bins = h.contains("bins") ? static_cast<int>(count_field(h, path, "bins", 2)) : 12;
  ExcursionOptions so = sampler_from_json(h.contains("sampler") ? h["sampler"] : Json(), path + ".sampler");
  const McParams p = mc(cfg);
  Reporter rep(opt, "hitpairs", cfg);

  const HitHistogram hist = empirical_hit_density(unit(xa), unit(ya), delta, p.n, p.seed, opt.workers, bins, so);
  std::string csv = "x_bin,y_bin,count,expected\n";
  for (int i = 0; i < bins; ++i) {
    for (int j = 0; j < bins; ++j) {
      csv += std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(hist.counts[i * bins + j]) + "," +
             num(hist.expected[i * bins + j] * static_cast<double>(hist.conditioned)) + "\n";
    }
  }
  const bool pass = hist.p_value > 0.01;
  rep.write_report({{"bins", bins},
                    {"hit", to_json(hist.hit)},
                    {"conditioned", hist.conditioned},
                    {"pooled_cells", hist.pooled_cells},
                    {"chi2", hist.chi2},
                    {"dof", hist.dof},
                    {"p_value", hist.p_value},
                    {"counts", hist.counts}},
                   pass, true);
  rep.write_csv(csv);
  return pass ? 0 : kExitVerdictFail;
}

int event_prob(const Options& opt) {
  const Json cfg = load_config(opt);
  const EventSpec spec = experiment(cfg);
  const McParams p = mc(cfg);
  std::optional<BridgeOptions> bridge;
  if (cfg.contains("two_stage")) {
    BridgeOptions b;
    b.dt = number_field(require_field(cfg, "config", "two_stage"), "config.two_stage", "bridge_dt", 0.0, 1e-2);
    bridge = b;
  }
  Reporter rep(opt, "event-prob", cfg);

  check_feasible(spec);
  const EventCounts c = count_events(spec, p.n, p.seed, opt.workers);
  const McEstimate est = bernoulli_estimate(c.events(), p.n, p.seed, config_digest(spec));
  Json result = {{"estimate", to_json(est)},
                 {"predicted_probability", predicted_probability(spec)},
                 {"one_hitting", c.one},
                 {"two_or_more_hitting", c.two}};
  if (bridge) {
    const McEstimate staged = estimate_event_two_stage(spec, p.n, derive_seed(p.seed, 0, 7), opt.workers, *bridge);
    require_same_config(est, staged);
    result["two_stage"] = to_json(staged);
    result["z"] = (est.mean - staged.mean) / std::hypot(est.std_error, staged.std_error);
  }
  rep.write_report(result);
  return 0;
}

int decay_fit(const Options& opt) {
  const Json cfg = load_config(opt);
  const EventSpec spec = experiment(cfg);
  const std::vector<double> grid = eps_grid_from_json(require_field(cfg, "config", "eps_grid"), "config.eps_grid");
  const McParams p = mc(cfg);
  Reporter rep(opt, "decay-fit", cfg);

  double total_length = 0.0;
  for (const ChordSpec& c : spec.chords) total_length += chord_length(spec, c);
  const double reference = kPi * total_length;
  std::vector<Json> lines;
  std::string csv = "eps,n,hits,mean,stderr,used\n";
  Json points = Json::array();
  const DecayFit fit = fit_decay(spec, grid, p.n, p.seed, opt.workers);
  for (const DecayPoint& d : fit.grid) {
    const Json rec = {{"record", "point"}, {"eps", d.eps}, {"estimate", to_json(d.estimate)}, {"used", d.used}};
    lines.push_back(rec);
    points.push_back(rec);
    csv += num(d.eps) + "," + std::to_string(d.estimate.n_samples) + "," + std::to_string(d.estimate.hits) + "," +
           num(d.estimate.mean) + "," + num(d.estimate.std_error) + "," + (d.used ? "1" : "0") + "\n";
  }
  Json fitrec = {{"record", "fit"},
                 {"fitted_rate", fit.fitted_rate},
                 {"rate_stderr", fit.rate_stderr},
                 {"log_prefactor", fit.log_prefactor},
                 {"prefactor_exponent", fit.prefactor_exponent},
                 {"reference_rate", reference},
                 {"relative_error", std::abs(fit.fitted_rate - reference) / reference}};
  if (fit.free_fit) fitrec["free_fit"] = {{"exponent", fit.free_exponent}, {"rate", fit.free_rate}};
  lines.push_back(fitrec);
  rep.write_lines(lines);
  rep.write_csv(csv);
  rep.write_report({{"points", points}, {"fit", fitrec}});
  return 0;
}

int suppression(const Options& opt) {
  const Json cfg = load_config(opt);
  const EventSpec spec = experiment(cfg);
  const std::vector<double> grid = eps_grid_from_json(require_field(cfg, "config", "eps_grid"), "config.eps_grid");
  const McParams p = mc(cfg);
  Reporter rep(opt, "suppression", cfg);

  const SuppressionCheck s = n_suppression_check(spec, grid, p.n, p.seed, opt.workers);
  std::vector<Json> lines;
  Json points = Json::array();
  std::string csv = "eps,n,one_hits,two_hits,ratio,ratio_stderr,used\n";
  for (const SuppressionPoint& d : s.grid) {
    const Json rec = {{"record", "point"},      {"eps", d.eps},   {"one", to_json(d.one)}, {"two", to_json(d.two)},
                      {"ratio", d.ratio},       {"ratio_stderr", d.ratio_stderr},          {"used", d.used}};
    lines.push_back(rec);
    points.push_back(rec);
    csv += num(d.eps) + "," + std::to_string(d.one.n_samples) + "," + std::to_string(d.one.hits) + "," +
           std::to_string(d.two.hits) + "," + num(d.ratio) + "," + num(d.ratio_stderr) + "," + (d.used ? "1" : "0") +
           "\n";
  }
  const Json fitrec = {{"record", "fit"},
                       {"extra_exponent", s.extra_exponent},
                       {"exponent_stderr", s.exponent_stderr},
                       {"ratios_below_one", s.ratios_below_one}};
  lines.push_back(fitrec);
  rep.write_lines(lines);
  rep.write_csv(csv);
  rep.write_report({{"points", points}, {"fit", fitrec}});
  return 0;
}

int rotation_check(const Options& opt) {
  const Json cfg = load_config(opt);
  const EventSpec spec = experiment(cfg);
  const double rotation = number_field(cfg, "config", "rotation", -kTwoPi, kTwoPi);
  const McParams p = mc(cfg);
  Reporter rep(opt, "rotation-check", cfg);

  const RotationCheck r = f_ratio_rotation_check(spec, rotation, p.n, p.seed, opt.workers);
  rep.write_report({{"rotation", r.rotation},
                    {"base", to_json(r.base)},
                    {"rotated", to_json(r.rotated)},
                    {"ratio", r.ratio},
                    {"ratio_stderr", r.ratio_stderr},
                    {"z", r.z}});
  return 0;
}

Json strands_json(const std::vector<std::pair<int, int>>& strands) {
  Json s = Json::array();
  for (auto [u, v] : strands) s.push_back({u, v});
  return s;
}

int configs_enumerate(const Options& opt) {
  const Json cfg = load_config(opt);
  const ChordDiagram d = diagram_from_json(require_field(cfg, "config", "diagram"), "config.diagram");
  Reporter rep(opt, "configs-enumerate", cfg);

  const auto configs = enumerate_admissible(d);
  Json list = Json::array();
  std::string csv = "config,crossroad,chord_i,chord_j,pattern\n";
  const auto roads = crossroads(d);
  for (std::size_t k = 0; k < configs.size(); ++k) {
    Json patterns = Json::array();
    for (std::size_t c = 0; c < configs[k].config.size(); ++c) {
      patterns.push_back(pattern_name(configs[k].config[c]));
      csv += std::to_string(k) + "," + std::to_string(c) + "," + std::to_string(roads[c].first) + "," +
             std::to_string(roads[c].second) + "," + pattern_name(configs[k].config[c]) + "\n";
    }
    list.push_back({{"patterns", patterns}, {"strands", strands_json(configs[k].strands)}});
  }
  rep.write_report({{"crossing_number", crossing_number(d)}, {"admissible_count", configs.size()}, {"admissible", list}});
  rep.write_csv(csv);
  return 0;
}

std::uint64_t factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

int configs_verify(const Options& opt) {
  const Json cfg = load_config(opt);
  const ChordDiagram d = diagram_from_json(require_field(cfg, "config", "diagram"), "config.diagram");
  Reporter rep(opt, "configs-verify", cfg);

  const MonotonicityReport m = verify_monotonicity_uniqueness(d);
  Json witnesses = Json::array();
  for (const auto& w : m.witnesses) {
    Json p = Json::array();
    for (Pattern x : w) p.push_back(pattern_name(x));
    witnesses.push_back(p);
  }
  Json result = {{"crossing_number", m.m},
                 {"configurations", m.configurations},
                 {"admissible", m.admissible},
                 {"all_cross_admissible", m.all_cross_admissible},
                 {"monotone", m.monotone},
                 {"unique", m.unique},
                 {"witnesses", witnesses}};
  bool pass = m.pass();
  const int n = d.n();
  if (n >= 1 && n <= 4) {
    const std::uint64_t count = count_connecting_configs(n, n);
    const std::uint64_t expect = (std::uint64_t{1} << n) * factorial(n);
    result["connecting_configs"] = {{"n", n}, {"k", n}, {"count", count}, {"expected", expect}};
    pass = pass && count == expect;
  }
  rep.write_report(result, pass, true);
  return pass ? 0 : kExitVerdictFail;
}

int report_error(const std::string& command, const std::string& code, const std::string& message) {
  const Json err = {{"schema_version", kSchemaVersion},
                    {"command", command},
                    {"error", {{"code", code}, {"message", message}}}};
  std::cout << err.dump(2) << std::endl;
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian excursion tube-event experiments"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"kernels-verify", "check kernel invariants and walk-on-spheres oracles", kernels_verify},
      {"sample", "dump one process sample with its event evaluation", sample},
      {"hitpairs", "first/last hit density of conditioned excursions against g", hitpairs},
      {"event-prob", "Monte Carlo estimate of the tube event probability", event_prob},
      {"decay-fit", "fit the exponential decay rate over an eps grid", decay_fit},
      {"suppression", "fit the extra eps power of two-excursion events", suppression},
      {"rotation-check", "ratio of event probabilities for a chord and its rotation", rotation_check},
      {"configs-enumerate", "list admissible crossing configurations of a diagram", configs_enumerate},
      {"configs-verify", "check monotonicity and uniqueness of a diagram", configs_verify},
  };
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--workers", opt.workers, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed-override", seed, "replace mc.seed");
    subs.emplace_back(sub, &c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("", "usage", e.what());
  }
  for (auto [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed-override") > 0) opt.seed_override = seed;
    try {
      return cmd->run(opt);
    } catch (const Error& e) {
      return report_error(cmd->name, std::string(to_string(e.code())), e.what());
    } catch (const std::exception& e) {
      return report_error(cmd->name, "internal", e.what());
    }
  }
  return kExitError;
}
