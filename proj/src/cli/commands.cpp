#include "codedelay/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "codedelay/cli/output_table.hpp"
#include "codedelay/delay.hpp"
#include "codedelay/efficiency.hpp"
#include "codedelay/error.hpp"
#include "codedelay/optimizer.hpp"
#include "json.hpp"

namespace codedelay::cli {
namespace {

// Missing or inconsistent flags detected after parsing.
class FlagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::optional<double> epsilon;
  std::optional<double> rate_bps;
  std::optional<double> packet_bits;
  std::optional<double> tp_s;
  std::optional<double> rtt_s;
  std::optional<int> k;
  std::optional<double> redundancy;
  std::optional<double> margin;
  std::string b_definition = "n_k";
  std::string rounding = "mixture";
  double weight_threshold = 1e-6;
  std::string format = "csv";
  std::string out;

  std::optional<int> k_min;
  std::optional<int> k_max;
  int k_points = 40;
  std::vector<int> k_list;
  std::vector<double> margins{0.02, 0.05, 0.1, 0.2};
  bool no_arq = false;
  std::int64_t arq_packets = 200000;

  std::optional<std::uint64_t> seed;
  std::int64_t n_packets = 100000;
  std::string mode = "idealized";
  bool real_codec = false;
  std::string trace;
  int reps = 1;
  std::optional<std::int64_t> hol_cap;
};

const std::map<std::string, BDefinition> kBDefinitions{
    {"n_k", BDefinition::kCodedCount}, {"k", BDefinition::kGenerationSize}};
const std::map<std::string, RoundingRule> kRoundingRules{
    {"mixture", RoundingRule::kMixture}, {"ceil", RoundingRule::kCeil}, {"floor", RoundingRule::kFloor}};
const std::map<std::string, SimMode> kModes{{"idealized", SimMode::kIdealized},
                                            {"relaxed", SimMode::kRelaxed}};

template <class T>
T require(const std::optional<T>& v, const char* flag) {
  if (!v) throw FlagError(std::string("missing required flag ") + flag);
  return *v;
}

ChannelParams channel_from(const Flags& f) {
  const double eps = require(f.epsilon, "--epsilon");
  const double rate = require(f.rate_bps, "--rate-bps");
  const double bits = require(f.packet_bits, "--packet-bits");
  if (f.tp_s) return derive_channel(eps, rate, bits, *f.tp_s);
  if (f.rtt_s) return derive_channel_from_rtt(eps, rate, bits, *f.rtt_s);
  throw FlagError("missing required flag --tp-s or --rtt-s");
}

double redundancy_from(const Flags& f, const ChannelParams& channel) {
  if (f.redundancy) return *f.redundancy;
  if (f.margin) return redundancy_from_margin(*f.margin, channel.epsilon);
  throw FlagError("missing required flag --redundancy or --margin");
}

DelayOptions delay_options(const Flags& f) {
  DelayOptions o;
  o.weight_threshold = f.weight_threshold;
  o.rounding = kRoundingRules.at(f.rounding);
  return o;
}

SweepOptions sweep_options(const Flags& f) {
  SweepOptions o;
  o.b_definition = kBDefinitions.at(f.b_definition);
  o.delay = delay_options(f);
  return o;
}

std::vector<int> k_range_from(const Flags& f, const ChannelParams& channel) {
  if (!f.k_list.empty()) return f.k_list;
  if (!f.k_min && !f.k_max) return default_k_range(channel.bdp, f.k_points);
  const auto defaults = default_k_range(channel.bdp, f.k_points);
  return log_spaced_k(f.k_min.value_or(defaults.front()), f.k_max.value_or(defaults.back()), f.k_points);
}

SimConfig sim_config_from(const Flags& f) {
  SimConfig c;
  c.channel = channel_from(f);
  c.coding = make_coding(c.channel, require(f.k, "--k"), redundancy_from(f, c.channel),
                         kBDefinitions.at(f.b_definition));
  c.mode = kModes.at(f.mode);
  c.n_packets = f.n_packets;
  c.seed = require(f.seed, "--seed");
  c.use_real_codec = f.real_codec;
  c.rounding = kRoundingRules.at(f.rounding);
  if (f.hol_cap) c.hol_cap = *f.hol_cap;
  return c;
}

// Cells shared by sweep-style rows.
Cell error_cell(const std::string& e) { return e; }

struct Result {
  OutputTable table;
  bool failed = false;  // some row carries an error
};

Result cmd_analyze(const Flags& f) {
  const ChannelParams channel = channel_from(f);
  const CodingParams coding = make_coding(channel, require(f.k, "--k"), redundancy_from(f, channel),
                                          kBDefinitions.at(f.b_definition));
  const DelayOptions opts = delay_options(f);
  KernelOptions kopt;
  kopt.rounding = opts.rounding;
  const TransitionKernel kernel = build_kernel(channel, coding, kopt);
  const DelayMoments d = expected_delay(channel, coding, kernel, opts);
  const EfficiencyResult e = efficiency(kernel);
  Result r{OutputTable({"mean_s", "std_s", "eta", "b", "truncated_mass"})};
  r.table.add_row({d.mean, d.stddev(), e.eta, coding.b, d.truncated_mass});
  return r;
}

Result cmd_sweep(const Flags& f) {
  const ChannelParams channel = channel_from(f);
  const double redundancy = redundancy_from(f, channel);
  std::vector<SweepRecord> records = sweep(channel, redundancy, k_range_from(f, channel), sweep_options(f));
  smooth_local_maxima(records);
  Result r{OutputTable({"k", "R", "epsilon", "bdp", "b", "mean_s", "std_s", "smoothed_mean_s", "eta",
                        "truncated_mass", "error"})};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const SweepRecord& s : records) {
    r.failed = r.failed || !s.ok();
    r.table.add_row({std::int64_t{s.k}, s.redundancy, s.epsilon, s.bdp, s.b, s.ok() ? s.mean : nan,
                     s.ok() ? s.std : nan, s.smoothed_mean.value_or(nan), s.ok() ? s.eta : nan,
                     s.truncated_mass, error_cell(s.error)});
  }
  return r;
}

Result cmd_kstar(const Flags& f) {
  const ChannelParams channel = channel_from(f);
  const double redundancy = redundancy_from(f, channel);
  const KStar best = k_star(channel, redundancy, k_range_from(f, channel), sweep_options(f));
  const SweepRecord& s = best.record;
  Result r{OutputTable({"k_star", "R", "epsilon", "bdp", "b", "mean_s", "std_s", "smoothed_mean_s", "eta"})};
  r.table.add_row({std::int64_t{best.k}, s.redundancy, s.epsilon, s.bdp, s.b, s.mean, s.std,
                   s.smoothed_mean.value_or(s.mean), s.eta});
  return r;
}

Result cmd_tradeoff(const Flags& f) {
  const ChannelParams channel = channel_from(f);
  TradeoffOptions opts;
  opts.sweep = sweep_options(f);
  opts.include_arq = !f.no_arq;
  opts.arq_packets = f.arq_packets;
  opts.arq_seed = f.seed.value_or(1);
  const auto points = tradeoff_curve(channel, f.margins, k_range_from(f, channel), opts);
  Result r{OutputTable({"scheme", "margin", "R", "k_star", "eta", "mean_s", "std_s", "error"})};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const TradeoffPoint& p : points) {
    const bool ok = p.error.empty();
    r.failed = r.failed || !ok;
    r.table.add_row({std::string(p.arq ? "arq" : "coded"), p.arq ? nan : p.margin,
                     p.arq ? 1.0 : p.redundancy, std::int64_t{p.k}, ok ? p.eta : nan,
                     ok ? p.mean : nan, ok ? p.std : nan, error_cell(p.error)});
  }
  return r;
}

Result cmd_simulate(const Flags& f) {
  SimConfig config = sim_config_from(f);
  config.record_packets = !f.trace.empty();
  const SimStats s = replicate(config, f.reps, SimProtocol::kCoded);
  if (!f.trace.empty()) {
    std::ofstream trace(f.trace, std::ios::binary);
    if (!trace) throw FlagError("cannot open trace file " + f.trace);
    write_trace(trace, config, s.packets);
  }
  Result r{OutputTable({"mode", "k", "R", "b", "reps", "n_packets", "mean_s", "std_s", "mean_se_s",
                        "efficiency", "generations", "innovation_failures"})};
  r.table.add_row({f.mode, std::int64_t{config.coding.k}, config.coding.redundancy, config.coding.b,
                   std::int64_t{s.replications}, s.delay_count, s.mean_delay, s.std_delay,
                   s.mean_delay_se, s.mean_efficiency, s.generations, s.innovation_failures});
  return r;
}

Result cmd_compare_arq(const Flags& f) {
  const SimConfig config = sim_config_from(f);
  const SimStats coded = replicate(config, f.reps, SimProtocol::kCoded);
  const SimStats arq = replicate(config, f.reps, SimProtocol::kArq);
  Result r{OutputTable({"mode", "k", "R", "coded_mean_s", "coded_std_s", "coded_efficiency",
                        "arq_mean_s", "arq_std_s", "arq_efficiency"})};
  r.table.add_row({f.mode, std::int64_t{config.coding.k}, config.coding.redundancy, coded.mean_delay,
                   coded.std_delay, coded.mean_efficiency, arq.mean_delay, arq.std_delay,
                   arq.mean_efficiency});
  return r;
}

void add_channel_options(CLI::App& app, Flags& f) {
  app.add_option("--epsilon", f.epsilon, "Packet erasure probability in [0, 1)")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--rate-bps", f.rate_bps, "Link rate in bits per second")->check(CLI::PositiveNumber);
  app.add_option("--packet-bits", f.packet_bits, "Packet size in bits")->check(CLI::PositiveNumber);
  auto* tp = app.add_option("--tp-s", f.tp_s, "One-way propagation delay in seconds")
                 ->check(CLI::NonNegativeNumber);
  auto* rtt = app.add_option("--rtt-s", f.rtt_s, "Round-trip time in seconds (t_s + 2 t_p)")
                  ->check(CLI::NonNegativeNumber);
  tp->excludes(rtt);
  app.add_option("--k", f.k, "Generation size")->check(CLI::PositiveNumber);
  auto* red = app.add_option("--redundancy", f.redundancy, "Redundancy R = n_k / k (>= 1)")
                  ->check(CLI::Range(1.0, std::numeric_limits<double>::max()));
  auto* margin = app.add_option("--margin", f.margin, "Margin x, R = (1 + x) / (1 - epsilon)")
                     ->check(CLI::NonNegativeNumber);
  red->excludes(margin);
  app.add_option("--b-definition", f.b_definition,
                 "Divisor of the BDP when counting generations in flight")
      ->check(CLI::IsMember({"n_k", "k"}))
      ->capture_default_str();
  app.add_option("--rounding", f.rounding, "How R*i is turned into a packet count")
      ->check(CLI::IsMember({"mixture", "ceil", "floor"}))
      ->capture_default_str();
  app.add_option("--weight-threshold", f.weight_threshold,
                 "Skip (y, z) cells whose probability is below this")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", f.out, "Write the table to this file instead of standard output");
}

void add_range_options(CLI::App& sub, Flags& f) {
  sub.add_option("--k-min", f.k_min, "Smallest k (default 2)")->check(CLI::PositiveNumber);
  sub.add_option("--k-max", f.k_max, "Largest k (default min(BDP - 1, 1024))")->check(CLI::PositiveNumber);
  sub.add_option("--k-points", f.k_points, "Number of log-spaced k values")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub.add_option("--k-list", f.k_list, "Explicit ascending k values (overrides the range)")
      ->delimiter(',');
}

void add_sim_options(CLI::App& sub, Flags& f) {
  sub.add_option("--seed", f.seed, "Master seed")->required();
  sub.add_option("--n-packets", f.n_packets, "Measured source packets")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub.add_option("--mode", f.mode, "Simulation mode")
      ->check(CLI::IsMember({"idealized", "relaxed"}))
      ->capture_default_str();
  sub.add_flag("--real-codec", f.real_codec, "Decode with GF(2^8) elimination");
  sub.add_option("--reps", f.reps, "Independent replications")->check(CLI::PositiveNumber)->capture_default_str();
  sub.add_option("--hol-cap", f.hol_cap,
                 "Earlier generations that can block delivery in idealized mode (default b - 1)")
      ->check(CLI::NonNegativeNumber);
}

int emit(const Result& r, const Flags& f, std::ostream& out, std::ostream& err) {
  std::ostringstream buf;
  r.table.write(buf, f.format == "json" ? Format::kJson : Format::kCsv);
  if (f.out.empty()) {
    out << buf.str();
  } else {
    std::ofstream file(f.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open " << f.out << '\n';
      return kExitFlagError;
    }
    file << buf.str();
  }
  if (r.failed) {
    err << "error: some points could not be evaluated; see the error column\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

std::string config_echo(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["epsilon"] = c.channel.epsilon;
  j["rate_bps"] = c.channel.rate_bps;
  j["packet_bits"] = c.channel.packet_size_bits;
  j["t_s"] = c.channel.t_s;
  j["t_p"] = c.channel.t_p;
  j["bdp"] = c.channel.bdp;
  j["k"] = c.coding.k;
  j["R"] = c.coding.redundancy;
  j["b"] = c.coding.b;
  j["b_definition"] = c.coding.b_definition == BDefinition::kCodedCount ? "n_k" : "k";
  j["mode"] = c.mode == SimMode::kIdealized ? "idealized" : "relaxed";
  j["n_packets"] = c.n_packets;
  j["seed"] = c.seed;
  j["real_codec"] = c.use_real_codec;
  j["hol_cap"] = c.hol_cap;
  return j.dump();
}

void write_trace(std::ostream& out, const SimConfig& config, const std::vector<PacketRecord>& packets) {
  out << "# " << config_echo(config) << '\n';
  out << "packet_id,generation_id,first_tx_slot,delivered_slot,delay_s\n";
  for (const PacketRecord& p : packets) {
    out << p.packet_id << ',' << p.generation_id << ',' << p.first_tx_slot << ',' << p.delivered_slot
        << ',' << format_double(p.delay) << '\n';
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"In-order delay and efficiency of systematic network-coded transport"};
  app.name("codedelay");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file of option=value lines (long option names)");
  add_channel_options(app, f);

  auto* analyze = app.add_subcommand("analyze", "Mean, std and efficiency at one operating point");
  auto* sweep_cmd = app.add_subcommand("sweep", "Delay and efficiency over a range of k");
  add_range_options(*sweep_cmd, f);
  auto* kstar = app.add_subcommand("kstar", "Generation size minimising the smoothed mean delay");
  add_range_options(*kstar, f);
  auto* tradeoff = app.add_subcommand("tradeoff", "k* and efficiency for several margins");
  add_range_options(*tradeoff, f);
  tradeoff->add_option("--margins", f.margins, "Margins x")->delimiter(',')->capture_default_str();
  tradeoff->add_flag("--no-arq", f.no_arq, "Omit the simulated ARQ reference point");
  tradeoff->add_option("--arq-packets", f.arq_packets, "Packets in the ARQ simulation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tradeoff->add_option("--seed", f.seed, "Seed of the ARQ simulation (default 1)");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo simulation of the coded scheme");
  add_sim_options(*simulate, f);
  simulate->add_option("--trace", f.trace, "Write per-packet records (replication 0) to this CSV");
  auto* compare = app.add_subcommand("compare-arq", "Coded scheme against selective-repeat ARQ");
  add_sim_options(*compare, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitFlagError;
  }

  try {
    Result r{OutputTable({})};
    if (analyze->parsed()) {
      r = cmd_analyze(f);
    } else if (sweep_cmd->parsed()) {
      r = cmd_sweep(f);
    } else if (kstar->parsed()) {
      r = cmd_kstar(f);
    } else if (tradeoff->parsed()) {
      r = cmd_tradeoff(f);
    } else if (simulate->parsed()) {
      r = cmd_simulate(f);
    } else {
      r = cmd_compare_arq(f);
    }
    return emit(r, f, out, err);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFlagError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitFlagError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"codedelay"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace codedelay::cli
