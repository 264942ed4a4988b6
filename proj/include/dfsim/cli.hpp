#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfsim/branch.hpp"
#include "dfsim/noise.hpp"
#include "dfsim/protocols.hpp"
#include "dfsim/report.hpp"
#include "dfsim/verify.hpp"

// Command-line front end. Verbs:
//   run         sample one outcome path of a protocol and report it
//   enumerate   expand every outcome path with its probability
//   verify      check the closed-form contracts and the correction table
//   noise-bench Monte-Carlo dephasing / leakage benchmarks
// Flags can also come from a JSON --config file; explicit flags win.
// Exit codes: 0 success, 1 check or runtime failure, 2 usage error.
namespace dfsim::cli {

inline std::optional<cx> parse_complex(const std::string& s) {
  double re = 0, im = 0;
  char trail = 0;
  const int n = std::sscanf(s.c_str(), " %lf , %lf %c", &re, &im, &trail);
  if (n != 2) return std::nullopt;
  return cx{re, im};
}

inline std::optional<PhaseParams> parse_phase_pair(const std::string& s) {
  double t = 0, tp = 0;
  char trail = 0;
  const int n = std::sscanf(s.c_str(), " %lf , %lf %c", &t, &tp, &trail);
  if (n != 2) return std::nullopt;
  return PhaseParams{t, tp};
}

namespace detail {

struct Options {
  std::optional<std::string> protocol;
  std::optional<std::string> alpha, beta, c, d;
  std::optional<std::string> phases;
  std::optional<double> theta;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> draws;
  std::optional<std::size_t> max_branches;
  std::optional<std::string> format;
  std::optional<std::string> out_path;
  std::optional<bool> full_transfer;
};

// Pulls "x,y"-style values out of a config entry that may be a string or a
// two-element numeric array.
inline std::optional<std::string> config_pair(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", j[0].get<double>(),
                  j[1].get<double>());
    return std::string(buf);
  }
  return std::nullopt;
}

inline void merge_config(Options& o, const nlohmann::json& cfg) {
  auto take_pair = [&cfg](std::optional<std::string>& field, const char* key) {
    if (!field && cfg.contains(key))
      if (auto v = config_pair(cfg.at(key))) field = *v;
  };
  auto take_str = [&cfg](std::optional<std::string>& field, const char* key) {
    if (!field && cfg.contains(key) && cfg.at(key).is_string())
      field = cfg.at(key).get<std::string>();
  };
  take_str(o.protocol, "protocol");
  take_pair(o.alpha, "alpha");
  take_pair(o.beta, "beta");
  take_pair(o.c, "c");
  take_pair(o.d, "d");
  take_pair(o.phases, "phases");
  if (!o.theta && cfg.contains("theta") && cfg.at("theta").is_number())
    o.theta = cfg.at("theta").get<double>();
  if (!o.seed && cfg.contains("seed") && cfg.at("seed").is_number_unsigned())
    o.seed = cfg.at("seed").get<std::uint64_t>();
  if (!o.samples && cfg.contains("samples") && cfg.at("samples").is_number_unsigned())
    o.samples = cfg.at("samples").get<std::size_t>();
  if (!o.draws && cfg.contains("draws") && cfg.at("draws").is_number_unsigned())
    o.draws = cfg.at("draws").get<std::size_t>();
  if (!o.max_branches && cfg.contains("max_branches") &&
      cfg.at("max_branches").is_number_unsigned())
    o.max_branches = cfg.at("max_branches").get<std::size_t>();
  take_str(o.format, "format");
  take_str(o.out_path, "out");
  if (!o.full_transfer && cfg.contains("full_transfer") &&
      cfg.at("full_transfer").is_boolean())
    o.full_transfer = cfg.at("full_transfer").get<bool>();
}

struct UsageError {
  std::string message;
};

inline cx required_amp(const std::optional<std::string>& field, const char* flag,
                       cx fallback) {
  if (!field) return fallback;
  if (auto v = parse_complex(*field)) return *v;
  throw UsageError{std::string(flag) + " expects \"re,im\""};
}

inline ProtocolDescriptor build_descriptor(const Options& o) {
  if (!o.protocol) throw UsageError{"--protocol is required"};
  if (!protocol_known(*o.protocol))
    throw UsageError{"unknown protocol '" + *o.protocol +
                     "' (expected rz, hadamard, cphase, or cr-block)"};
  ProtocolDescriptor d;
  d.name = *o.protocol;
  d.theta = o.theta.value_or(0.0);
  if (o.phases) {
    auto p = parse_phase_pair(*o.phases);
    if (!p) throw UsageError{"--phases expects \"phi_t,phi_tp\""};
    d.phases = *p;
  }
  d.full_transfer = o.full_transfer.value_or(false);
  return d;
}

inline ProtocolInput build_input(const Options& o, const ProtocolDescriptor& d) {
  ProtocolInput in;
  in.a.alpha = required_amp(o.alpha, "--alpha", cx{1, 0});
  in.a.beta = required_amp(o.beta, "--beta", cx{0, 0});
  in.b.alpha = required_amp(o.c, "--c", cx{1, 0});
  in.b.beta = required_amp(o.d, "--d", cx{0, 0});
  require_normalized(in.a);
  if (protocol_logical_width(d) == 2) require_normalized(in.b);
  return in;
}

inline ordered_json input_json(const ProtocolInput& in, std::size_t width) {
  ordered_json o;
  o["a"] = ordered_json::array({to_json(in.a.alpha), to_json(in.a.beta)});
  if (width == 2)
    o["b"] = ordered_json::array({to_json(in.b.alpha), to_json(in.b.beta)});
  return o;
}

inline ordered_json descriptor_json(const ProtocolDescriptor& d) {
  ordered_json o;
  o["protocol"] = d.name;
  if (d.name == "rz") o["theta"] = d.theta;
  else o["phases"] = ordered_json::array({d.phases.phi_t, d.phases.phi_tp});
  if (d.name == "hadamard" || d.name == "cphase")
    o["full_transfer"] = d.full_transfer;
  return o;
}

inline void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out_path) {
    std::ofstream f(*o.out_path);
    if (!f) throw UsageError{"cannot open output file '" + *o.out_path + "'"};
    f << text;
    return;
  }
  out << text;
}

inline std::string resolved_format(const Options& o) {
  const std::string f = o.format.value_or("json");
  if (f != "json" && f != "csv")
    throw UsageError{"--format expects json or csv"};
  return f;
}

inline int verb_run(const Options& o, std::ostream& out) {
  const ProtocolDescriptor d = build_descriptor(o);
  const ProtocolInput in = build_input(o, d);
  const std::uint64_t seed = o.seed.value_or(1);
  const ProtocolResult r = run_protocol_sampled(d, in, seed);
  const std::vector<cx> amps = extract_output_amplitudes(r);
  const double fid = branch_fidelity(r, d, in);

  ordered_json doc = descriptor_json(d);
  doc["seed"] = seed;
  doc["input"] = input_json(in, protocol_logical_width(d));
  doc["record"] = to_json(r.record);
  doc["branch_probability"] = r.record.branch_probability();
  doc["corrections"] = to_json(r.corrections);
  ordered_json pairs = ordered_json::array();
  for (const LogicalQubit& p : r.output_pairs)
    pairs.push_back(ordered_json::array({p.first, p.second}));
  doc["output"] = ordered_json{{"amplitudes", to_json(amps)}, {"pairs", pairs}};
  doc["fidelity_vs_ideal"] = fid;

  if (resolved_format(o) == "json") {
    emit(o, doc.dump(2) + "\n", out);
  } else {
    std::ostringstream csv;
    csv << "key,value\n";
    csv << "protocol," << d.name << "\n";
    csv << "branch," << csv_escape(r.record.key()) << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.record.branch_probability());
    csv << "branch_probability," << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", fid);
    csv << "fidelity_vs_ideal," << buf << "\n";
    emit(o, csv.str(), out);
  }
  return 0;
}

inline int verb_enumerate(const Options& o, std::ostream& out) {
  const ProtocolDescriptor d = build_descriptor(o);
  const ProtocolInput in = build_input(o, d);
  const std::size_t cap = o.max_branches.value_or(std::size_t{1} << 15);
  const BranchTree tree = enumerate_branches(d, protocol_initial_state(d, in), cap);

  double min_fid = 1.0;
  std::vector<double> fids;
  fids.reserve(tree.branches.size());
  for (const Branch& b : tree.branches) {
    ProtocolResult r;
    r.state = b.state;
    r.record = b.record;
    r.corrections = b.corrections;
    r.output_pairs = b.output_pairs;
    const double f = branch_fidelity(r, d, in);
    fids.push_back(f);
    if (f < min_fid) min_fid = f;
  }

  if (resolved_format(o) == "json") {
    ordered_json doc = descriptor_json(d);
    doc["input"] = input_json(in, protocol_logical_width(d));
    doc["branch_count"] = tree.branches.size();
    doc["probability_sum"] = tree.probability_sum();
    doc["min_branch_fidelity"] = min_fid;
    const bool small = tree.branches.size() <= 64;
    ordered_json arr = ordered_json::array();
    for (std::size_t i = 0; i < tree.branches.size(); ++i) {
      const Branch& b = tree.branches[i];
      ordered_json e;
      e["key"] = b.record.key();
      e["probability"] = b.probability;
      e["fidelity"] = fids[i];
      e["corrections"] = to_json(b.corrections);
      if (small)
        e["output_amplitudes"] =
            to_json(extract_output_amplitudes(b.state, b.output_pairs));
      arr.push_back(std::move(e));
    }
    doc["branches"] = std::move(arr);
    emit(o, doc.dump(2) + "\n", out);
  } else {
    std::ostringstream csv;
    csv << "key,probability,fidelity\n";
    char buf[64];
    for (std::size_t i = 0; i < tree.branches.size(); ++i) {
      csv << csv_escape(tree.branches[i].record.key()) << ',';
      std::snprintf(buf, sizeof buf, "%.17g", tree.branches[i].probability);
      csv << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", fids[i]);
      csv << buf << '\n';
    }
    emit(o, csv.str(), out);
  }
  return 0;
}

inline int verb_verify(const Options& o, std::ostream& out) {
  const std::size_t draws = o.draws.value_or(16);
  const std::uint64_t seed = o.seed.value_or(1);
  const VerifyReport rep = run_verify_suite(draws, seed);

  if (resolved_format(o) == "json") {
    emit(o, to_json(rep).dump(2) + "\n", out);
  } else {
    std::ostringstream csv;
    csv << "kind,name,draws,min_fidelity,pass\n";
    char buf[64];
    for (const ContractCheck& c : rep.contracts) {
      std::snprintf(buf, sizeof buf, "%.17g", c.min_fidelity);
      csv << "contract," << csv_escape(c.contract) << ',' << c.draws << ','
          << buf << ',' << (c.pass ? "true" : "false") << '\n';
    }
    for (const TableCellCheck& c : rep.table) {
      std::snprintf(buf, sizeof buf, "%.17g", c.min_fidelity);
      csv << "table-cell,p1=" << c.parity_control << ";p2=" << c.parity_target
          << ";m=" << c.dressed << ',' << c.draws << ',' << buf << ','
          << (c.pass ? "true" : "false") << '\n';
    }
    emit(o, csv.str(), out);
  }
  return rep.pass ? 0 : 1;
}

inline std::size_t worker_count() {
  if (const char* env = std::getenv("DFS_SIM_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

inline int verb_noise_bench(const Options& o, std::ostream& out) {
  const std::size_t samples = o.samples.value_or(2000);
  const std::uint64_t seed = o.seed.value_or(1);
  const double r = 1.0 / std::numbers::sqrt2;

  std::vector<BenchRow> rows(4);
  // Row jobs are independent; each is seeded on its own, so the report does
  // not depend on the worker count.
  std::vector<std::function<void()>> jobs;
  jobs.push_back([&rows, samples, seed, r] {
    const PureState s = encode_logical(LogicalAmplitudes{cx{r, 0}, cx{r, 0}});
    const DephasingBench b = fidelity_under_dephasing(
        s, CollectiveDephasingSpec{PhaseDistribution::uniform, 0, 0}, samples, seed);
    rows[0] = BenchRow{"dfs-uniform", "dfs", "uniform", 0.0,
                       "fidelity", b.mean_fidelity, b.std_error, b.samples};
  });
  jobs.push_back([&rows, samples, seed, r] {
    const PureState s =
        PureState::unchecked(std::vector<cx>{cx{r, 0}, cx{r, 0}}, 1);
    const DephasingBench b = fidelity_under_dephasing(
        s, CollectiveDephasingSpec{PhaseDistribution::uniform, 0, 0}, samples,
        seed + 1);
    rows[1] = BenchRow{"bare-uniform", "bare", "uniform", 0.0,
                       "fidelity", b.mean_fidelity, b.std_error, b.samples};
  });
  jobs.push_back([&rows, samples, seed, r] {
    const PureState s =
        PureState::unchecked(std::vector<cx>{cx{r, 0}, cx{r, 0}}, 1);
    const DephasingBench b = fidelity_under_dephasing(
        s,
        CollectiveDephasingSpec{PhaseDistribution::fixed, std::numbers::pi, 0},
        samples, seed + 2);
    rows[2] = BenchRow{"bare-fixed-pi", "bare", "fixed", std::numbers::pi,
                       "fidelity", b.mean_fidelity, b.std_error, b.samples};
  });
  jobs.push_back([&rows, samples, seed, r] {
    const LeakageBench b = dfs_weight_under_error(
        LogicalAmplitudes{cx{r, 0}, cx{r, 0}},
        ErrorOperatorSpec{ErrorKind::x_first, 0.1}, samples, seed + 3);
    rows[3] = BenchRow{"dfs-error-x-first", "dfs", "error:x-first", 0.1,
                       "dfs-weight", b.mean_dfs_weight, b.std_error, b.samples};
  });

  const std::size_t workers = std::min(worker_count(), jobs.size());
  if (workers <= 1) {
    for (auto& j : jobs) j();
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&jobs, &next] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) jobs[i]();
      });
    for (std::thread& t : pool) t.join();
  }

  if (resolved_format(o) == "json") {
    ordered_json doc;
    doc["samples"] = samples;
    doc["seed"] = seed;
    ordered_json arr = ordered_json::array();
    for (const BenchRow& row : rows) arr.push_back(to_json(row));
    doc["rows"] = std::move(arr);
    emit(o, doc.dump(2) + "\n", out);
  } else {
    std::ostringstream csv;
    write_bench_csv(csv, rows);
    emit(o, csv.str(), out);
  }
  return 0;
}

}  // namespace detail

// Entry point shared by the installed binary and the in-process tests.
inline int run_main(int argc, const char* const* argv, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"decoherence-protected two-qubit-encoding simulator"};
  app.require_subcommand(1);

  detail::Options o;
  std::string config_path;
  std::string protocol, alpha, beta, cval, dval, phases, format, out_path;
  double theta = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0, draws = 0, max_branches = 0;
  bool full_transfer = false;

  struct Bound {
    CLI::Option* opt;
    std::function<void()> commit;
  };
  std::vector<Bound> bound;
  auto add_common = [&](CLI::App* cmd, bool wants_protocol, bool wants_seed,
                        bool wants_samples, bool wants_draws,
                        bool wants_branches) {
    cmd->add_option("--config", config_path, "JSON file with default flag values");
    if (wants_protocol) {
      bound.push_back({cmd->add_option("--protocol", protocol,
                                       "rz, hadamard, cphase, or cr-block"),
                       [&] { o.protocol = protocol; }});
      bound.push_back({cmd->add_option("--alpha", alpha, "first input, |01> amplitude as re,im"),
                       [&] { o.alpha = alpha; }});
      bound.push_back({cmd->add_option("--beta", beta, "first input, |10> amplitude as re,im"),
                       [&] { o.beta = beta; }});
      bound.push_back({cmd->add_option("--c", cval, "second input, |01> amplitude as re,im"),
                       [&] { o.c = cval; }});
      bound.push_back({cmd->add_option("--d", dval, "second input, |10> amplitude as re,im"),
                       [&] { o.d = dval; }});
      bound.push_back({cmd->add_option("--phases", phases, "phase knobs as phi_t,phi_tp"),
                       [&] { o.phases = phases; }});
      bound.push_back({cmd->add_option("--theta", theta, "rotation angle for rz"),
                       [&] { o.theta = theta; }});
      bound.push_back({cmd->add_flag("--full-transfer", full_transfer,
                                     "keep teleported pairs in fresh registers"),
                       [&] { o.full_transfer = full_transfer; }});
    }
    if (wants_seed)
      bound.push_back({cmd->add_option("--seed", seed, "RNG seed"),
                       [&] { o.seed = seed; }});
    if (wants_samples)
      bound.push_back({cmd->add_option("--samples", samples, "Monte-Carlo sample count"),
                       [&] { o.samples = samples; }});
    if (wants_draws)
      bound.push_back({cmd->add_option("--draws", draws, "random draws per check"),
                       [&] { o.draws = draws; }});
    if (wants_branches)
      bound.push_back({cmd->add_option("--max-branches", max_branches,
                                       "abort if the tree grows past this"),
                       [&] { o.max_branches = max_branches; }});
    bound.push_back({cmd->add_option("--format", format, "json or csv"),
                     [&] { o.format = format; }});
    bound.push_back({cmd->add_option("--out", out_path, "write the report here instead of stdout"),
                     [&] { o.out_path = out_path; }});
  };

  CLI::App* cmd_run = app.add_subcommand("run", "sample one outcome path");
  add_common(cmd_run, true, true, false, false, false);
  CLI::App* cmd_enum = app.add_subcommand("enumerate", "expand all outcome paths");
  add_common(cmd_enum, true, false, false, false, true);
  CLI::App* cmd_verify = app.add_subcommand("verify", "check closed-form contracts");
  add_common(cmd_verify, false, true, false, true, false);
  CLI::App* cmd_bench = app.add_subcommand("noise-bench", "dephasing and leakage benchmarks");
  add_common(cmd_bench, false, true, true, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  for (const Bound& b : bound)
    if (b.opt->count() > 0) b.commit();

  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw detail::UsageError{"cannot open config '" + config_path + "'"};
      nlohmann::json cfg;
      try {
        f >> cfg;
      } catch (const nlohmann::json::exception& e) {
        throw detail::UsageError{"bad config: " + std::string(e.what())};
      }
      if (!cfg.is_object()) throw detail::UsageError{"config must be a JSON object"};
      detail::merge_config(o, cfg);
    }
    if (app.got_subcommand(cmd_run)) return detail::verb_run(o, out);
    if (app.got_subcommand(cmd_enum)) return detail::verb_enumerate(o, out);
    if (app.got_subcommand(cmd_verify)) return detail::verb_verify(o, out);
    return detail::verb_noise_bench(o, out);
  } catch (const detail::UsageError& e) {
    err << "error: " << e.message << "\n";
    return 2;
  } catch (const InvalidArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dfsim::cli
