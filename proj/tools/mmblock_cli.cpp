// mmblock: analytic sweeps, simulations, trace fitting and p_C evaluation
// for mm-wave links under transient blockage.
//
// Exit codes: 0 ok, 2 configuration/spec error, 3 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mmblock/mmblock.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw mmblock::IoError("cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw mmblock::IoError("error while writing " + path);
}

struct SweepArgs {
  std::string config;
  std::string parameter;
  std::string values;
  std::string range;
  std::string mu_list;
  std::string mode = "analytic";
  std::uint64_t seed = 1;
  std::string out;
  double duration = 0.0;
};

int run_sweep_command(const SweepArgs& args) {
  using namespace mmblock;
  const auto base = load_config(args.config);
  SweepSpec spec;
  spec.parameter = parse_sweep_parameter(args.parameter);
  if (args.values.empty() == args.range.empty()) {
    throw SweepSpecError("give exactly one of --values or --range");
  }
  spec.values = args.values.empty() ? parse_range(args.range)
                                    : parse_values(args.values);
  if (!args.mu_list.empty()) spec.cross_mu = parse_values(args.mu_list);

  SweepRunOptions opt;
  opt.mode = parse_sweep_mode(args.mode);
  opt.seed = args.seed;
  opt.duration = args.duration;
  const auto result = run_sweep(base, spec, opt);
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  emit(csv.str(), args.out);
  return kExitOk;
}

struct SimulateArgs {
  std::string config;
  double duration = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  double bin = 0.5;
  std::string engine = "events";
};

int run_simulate_command(const SimulateArgs& args) {
  using namespace mmblock;
  const auto scenario = validate(load_config(args.config));
  const double duration =
      args.duration > 0.0 ? args.duration : 200.0 * scenario.config.blockage.mu;

  SimulationResult result;
  if (args.engine == "events") {
    EventSimOptions opt;
    opt.bin = args.bin;
    result = simulate_events(scenario, duration, args.seed, opt);
  } else if (args.engine == "chain") {
    ChainSimOptions opt;
    opt.slot = scenario.config.timing.slot;
    opt.bin = args.bin;
    const auto slots = static_cast<std::int64_t>(duration / opt.slot);
    result = simulate_chain(build_chain(scenario), slots, args.seed, opt);
  } else {
    throw SweepSpecError("engine must be events or chain");
  }

  std::ostringstream csv;
  write_series_csv(csv, result);
  emit(csv.str(), args.out);

  auto& log = args.out.empty() || args.out == "-" ? std::cerr : std::cout;
  log << "mean_bps = " << format_number(result.mean) << '\n'
      << "std_bps = " << format_number(std::sqrt(result.variance)) << '\n'
      << "occupancy = " << join_numbers(result.occupancy) << '\n';
  if (result.events) {
    const auto& k = *result.events;
    log << "blockages = " << k.blockages << '\n'
        << "sweeps = " << k.sweeps << '\n'
        << "p_C_empirical = " << format_number(k.preemption_fraction()) << '\n'
        << "bits_dropped = " << k.bits_dropped << '\n';
  }
  return kExitOk;
}

struct TraceFitArgs {
  std::string trace;
  std::size_t max_levels = 4;
  double threshold = 0.3;
  std::string out;
  double mu = 0.0;
  double slot = 1e-3;
};

int run_trace_fit_command(const TraceFitArgs& args) {
  using namespace mmblock;
  const auto trace = load_trace_file(args.trace);
  const auto model = extract_levels(trace, args.max_levels, args.threshold);
  std::ostringstream text;
  write_model_fragment(text, model);
  if (args.mu > 0.0) {
    const auto chain =
        build_chain(empirical_chain_parameters(model, args.mu, args.slot));
    const auto pi = stationary(chain);
    const auto s = summarize(pi.pi, chain.throughput());
    text << "# at mu = " << format_number(args.mu)
         << " s: mean_bps = " << format_number(s.mean)
         << ", std_bps = " << format_number(s.std_dev) << '\n';
  }
  emit(text.str(), args.out);
  return kExitOk;
}

struct PcArgs {
  double mu = 0.0;
  double sigma = 0.0;
  std::string ssi;
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
};

int run_pc_command(const PcArgs& args) {
  using namespace mmblock;
  auto s = parse_number(args.ssi);
  if (!s) throw SweepSpecError("--ssi must be a number or inf");
  const PreemptionInputs in{args.mu, args.sigma, *s};
  const double closed = sweep_preemption_probability(in);
  const auto mc = sweep_preemption_mc(in, args.samples, args.seed);
  std::cout << "p_C = " << format_number(closed) << '\n'
            << "p_C_mc = " << format_number(mc.estimate) << '\n'
            << "p_C_mc_se = " << format_number(mc.standard_error) << '\n';
  return kExitOk;
}

struct AnalyzeArgs {
  std::string config;
  std::string dump_chain;
};

int run_analyze_command(const AnalyzeArgs& args) {
  using namespace mmblock;
  const auto a = analyze(load_config(args.config));
  const auto& d = a.scenario.derived;
  std::cout << "block_duration_s = " << format_number(d.block_duration) << '\n'
            << "t_acc_s = " << format_number(d.t_acc) << '\n'
            << "f = " << format_number(d.f) << '\n'
            << "load_bps = " << format_number(d.load) << '\n'
            << "p_C = " << format_number(a.p_c) << '\n'
            << "t_b_mean_s = " << format_number(a.link.blockage.t_b_mean)
            << '\n'
            << "state_throughput_bps = " << join_numbers(a.chain.throughput())
            << '\n'
            << "pi = " << join_numbers(a.pi.pi) << '\n'
            << "mean_bps = " << format_number(a.summary.mean) << '\n'
            << "std_bps = " << format_number(a.summary.std_dev) << '\n';
  if (!args.dump_chain.empty()) {
    std::ostringstream csv;
    write_chain_csv(csv, a.chain);
    emit(csv.str(), args.dump_chain);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mm-wave transient blockage throughput model"};
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "analytic or simulated grid");
  sweep_cmd->add_option("--config", sweep.config, "scenario file")->required();
  sweep_cmd->add_option("--sweep", sweep.parameter, "a_factor, ssi, v or mu")
      ->required();
  sweep_cmd->add_option("--values", sweep.values, "comma separated values");
  sweep_cmd->add_option("--range", sweep.range, "min:max:count[:log]");
  sweep_cmd->add_option("--mu-list", sweep.mu_list, "second axis over mu");
  sweep_cmd->add_option("--mode", sweep.mode, "analytic or simulate");
  sweep_cmd->add_option("--seed", sweep.seed, "base seed (simulate mode)");
  sweep_cmd->add_option("--out", sweep.out, "CSV output path");
  sweep_cmd->add_option("--duration", sweep.duration,
                        "seconds per point (simulate mode)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "single scenario series");
  sim_cmd->add_option("--config", sim.config, "scenario file")->required();
  sim_cmd->add_option("--duration", sim.duration, "simulated seconds");
  sim_cmd->add_option("--seed", sim.seed, "seed");
  sim_cmd->add_option("--out", sim.out, "series CSV output path");
  sim_cmd->add_option("--bin", sim.bin, "series bin width in seconds");
  sim_cmd->add_option("--engine", sim.engine, "events or chain");

  TraceFitArgs fit;
  auto* fit_cmd = app.add_subcommand("trace-fit", "fit levels to a trace");
  fit_cmd->add_option("--trace", fit.trace, "time_s,throughput_bps CSV")
      ->required();
  fit_cmd->add_option("--max-levels", fit.max_levels, "largest level count");
  fit_cmd->add_option("--threshold", fit.threshold,
                      "dip threshold as a fraction of the peak");
  fit_cmd->add_option("--out", fit.out, "output path for the fragment");
  fit_cmd->add_option("--mu", fit.mu, "evaluate the fitted chain at this mu");

  PcArgs pc;
  auto* pc_cmd = app.add_subcommand("pc", "sweep preemption probability");
  pc_cmd->add_option("--mu", pc.mu, "mean blockage interval")->required();
  pc_cmd->add_option("--sigma", pc.sigma, "its standard deviation")->required();
  pc_cmd->add_option("--ssi", pc.ssi, "sweep interval or inf")->required();
  pc_cmd->add_option("--samples", pc.samples, "Monte Carlo samples");
  pc_cmd->add_option("--seed", pc.seed, "seed");

  AnalyzeArgs an;
  auto* an_cmd = app.add_subcommand("analyze", "derived values and summary");
  an_cmd->add_option("--config", an.config, "scenario file")->required();
  an_cmd->add_option("--dump-chain", an.dump_chain, "transition matrix CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep_cmd) return run_sweep_command(sweep);
    if (*sim_cmd) return run_simulate_command(sim);
    if (*fit_cmd) return run_trace_fit_command(fit);
    if (*pc_cmd) return run_pc_command(pc);
    if (*an_cmd) return run_analyze_command(an);
  } catch (const mmblock::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
