#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "codedelay/delay.hpp"
#include "codedelay/efficiency.hpp"
#include "codedelay/error.hpp"
#include "codedelay/kernel.hpp"
#include "codedelay/moments.hpp"
#include "codedelay/optimizer.hpp"
#include "codedelay/params.hpp"
#include "codedelay/rlnc.hpp"
#include "codedelay/rng.hpp"
#include "codedelay/simulator.hpp"

namespace py = pybind11;
using namespace codedelay;

namespace {

py::bytes to_py(const Bytes& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

Bytes from_py(const py::bytes& b) {
  const std::string s = b;
  return Bytes(s.begin(), s.end());
}

}  // namespace

PYBIND11_MODULE(_codedelay, m) {
  m.doc() = "In-order delay and efficiency of systematic network-coded transport";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::enum_<BDefinition>(m, "BDefinition")
      .value("CODED_COUNT", BDefinition::kCodedCount)
      .value("GENERATION_SIZE", BDefinition::kGenerationSize);
  py::enum_<RoundingRule>(m, "RoundingRule")
      .value("MIXTURE", RoundingRule::kMixture)
      .value("CEIL", RoundingRule::kCeil)
      .value("FLOOR", RoundingRule::kFloor);
  py::enum_<SimMode>(m, "SimMode")
      .value("IDEALIZED", SimMode::kIdealized)
      .value("RELAXED", SimMode::kRelaxed);

  py::class_<ChannelParams>(m, "ChannelParams")
      .def_readonly("epsilon", &ChannelParams::epsilon)
      .def_readonly("rate_bps", &ChannelParams::rate_bps)
      .def_readonly("packet_size_bits", &ChannelParams::packet_size_bits)
      .def_readonly("t_s", &ChannelParams::t_s)
      .def_readonly("t_p", &ChannelParams::t_p)
      .def_readonly("rtt", &ChannelParams::rtt)
      .def_readonly("bdp", &ChannelParams::bdp);
  m.def("derive_channel", &derive_channel, py::arg("epsilon"), py::arg("rate_bps"),
        py::arg("packet_size_bits"), py::arg("t_p"));
  m.def("derive_channel_from_rtt", &derive_channel_from_rtt, py::arg("epsilon"),
        py::arg("rate_bps"), py::arg("packet_size_bits"), py::arg("rtt"));

  py::class_<CodingParams>(m, "CodingParams")
      .def_readonly("k", &CodingParams::k)
      .def_readonly("redundancy", &CodingParams::redundancy)
      .def_readonly("n_low", &CodingParams::n_low)
      .def_readonly("n_high", &CodingParams::n_high)
      .def_readonly("frac", &CodingParams::frac)
      .def_readonly("b", &CodingParams::b)
      .def_readonly("b_definition", &CodingParams::b_definition)
      .def_readonly("exceeds_bdp", &CodingParams::exceeds_bdp);
  m.def("make_coding", &make_coding, py::arg("channel"), py::arg("k"), py::arg("redundancy"),
        py::arg("b_definition") = BDefinition::kCodedCount);
  m.def("redundancy_from_margin", &redundancy_from_margin, py::arg("margin"), py::arg("epsilon"));

  py::class_<TransitionKernel>(m, "TransitionKernel")
      .def(py::init([](double epsilon, double redundancy, int k, RoundingRule rounding) {
             KernelOptions o;
             o.rounding = rounding;
             return TransitionKernel(epsilon, redundancy, k, o);
           }),
           py::arg("epsilon"), py::arg("redundancy"), py::arg("k"),
           py::arg("rounding") = RoundingRule::kMixture)
      .def_property_readonly("k", &TransitionKernel::k)
      .def("__call__", &TransitionKernel::operator(), py::arg("i"), py::arg("j"))
      .def("absorption_cdf", &TransitionKernel::absorption_cdf, py::arg("r"))
      .def("survival", &TransitionKernel::survival, py::arg("r"))
      .def("p_y", &TransitionKernel::p_y, py::arg("y"))
      .def("p_z", &TransitionKernel::p_z, py::arg("n"), py::arg("z"))
      .def_property_readonly("horizon", &TransitionKernel::horizon);

  py::class_<PrefixMoments>(m, "PrefixMoments")
      .def_readonly("first_round", &PrefixMoments::first_round)
      .def_readonly("retransmitted", &PrefixMoments::retransmitted)
      .def_readonly("lossless", &PrefixMoments::lossless);
  m.def("prefix_moments", &prefix_moments, py::arg("epsilon"), py::arg("k"));
  py::class_<StragglerMoments>(m, "StragglerMoments")
      .def_readonly("v1", &StragglerMoments::v1)
      .def_readonly("v2", &StragglerMoments::v2);
  m.def("straggler_moments", &straggler_moments, py::arg("kernel"), py::arg("n"), py::arg("z"));

  py::class_<DelayMoments>(m, "DelayMoments")
      .def_readonly("mean", &DelayMoments::mean)
      .def_readonly("second_moment", &DelayMoments::second_moment)
      .def_readonly("variance", &DelayMoments::variance)
      .def_readonly("truncated_mass", &DelayMoments::truncated_mass)
      .def_readonly("terms_evaluated", &DelayMoments::terms_evaluated)
      .def_property_readonly("std", &DelayMoments::stddev);
  m.def(
      "expected_delay",
      [](const ChannelParams& channel, const CodingParams& coding, double weight_threshold,
         RoundingRule rounding) {
        DelayOptions o;
        o.weight_threshold = weight_threshold;
        o.rounding = rounding;
        return expected_delay(channel, coding, o);
      },
      py::arg("channel"), py::arg("coding"), py::arg("weight_threshold") = 1e-6,
      py::arg("rounding") = RoundingRule::kMixture);

  py::class_<EfficiencyResult>(m, "EfficiencyResult")
      .def_readonly("expected_received", &EfficiencyResult::expected_received)
      .def_readonly("eta", &EfficiencyResult::eta);
  m.def("efficiency", &efficiency, py::arg("kernel"));

  py::class_<SweepRecord>(m, "SweepRecord")
      .def_readonly("k", &SweepRecord::k)
      .def_readonly("redundancy", &SweepRecord::redundancy)
      .def_readonly("epsilon", &SweepRecord::epsilon)
      .def_readonly("bdp", &SweepRecord::bdp)
      .def_readonly("mean", &SweepRecord::mean)
      .def_readonly("std", &SweepRecord::std)
      .def_readonly("eta", &SweepRecord::eta)
      .def_readonly("b", &SweepRecord::b)
      .def_readonly("smoothed_mean", &SweepRecord::smoothed_mean)
      .def_readonly("error", &SweepRecord::error);
  m.def("default_k_range", &default_k_range, py::arg("bdp"), py::arg("points") = 40);
  m.def(
      "sweep",
      [](const ChannelParams& channel, double redundancy, const std::vector<int>& ks, bool smooth) {
        auto records = sweep(channel, redundancy, ks);
        if (smooth) smooth_local_maxima(records);
        return records;
      },
      py::arg("channel"), py::arg("redundancy"), py::arg("k_range"), py::arg("smooth") = true);
  m.def(
      "k_star",
      [](const ChannelParams& channel, double redundancy, const std::vector<int>& ks) {
        const KStar best = k_star(channel, redundancy, ks);
        return py::make_tuple(best.k, best.record);
      },
      py::arg("channel"), py::arg("redundancy"), py::arg("k_range"));

  py::class_<TradeoffPoint>(m, "TradeoffPoint")
      .def_readonly("margin", &TradeoffPoint::margin)
      .def_readonly("redundancy", &TradeoffPoint::redundancy)
      .def_readonly("k", &TradeoffPoint::k)
      .def_readonly("eta", &TradeoffPoint::eta)
      .def_readonly("mean", &TradeoffPoint::mean)
      .def_readonly("std", &TradeoffPoint::std)
      .def_readonly("arq", &TradeoffPoint::arq)
      .def_readonly("error", &TradeoffPoint::error);
  m.def(
      "tradeoff_curve",
      [](const ChannelParams& channel, const std::vector<double>& margins,
         const std::vector<int>& ks, bool include_arq) {
        TradeoffOptions o;
        o.include_arq = include_arq;
        return tradeoff_curve(channel, margins, ks, o);
      },
      py::arg("channel"), py::arg("margins"), py::arg("k_range"), py::arg("include_arq") = true);

  py::class_<PacketRecord>(m, "PacketRecord")
      .def_readonly("packet_id", &PacketRecord::packet_id)
      .def_readonly("generation_id", &PacketRecord::generation_id)
      .def_readonly("first_tx_slot", &PacketRecord::first_tx_slot)
      .def_readonly("delivered_slot", &PacketRecord::delivered_slot)
      .def_readonly("delay", &PacketRecord::delay);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init([](const ChannelParams& channel, const CodingParams& coding, SimMode mode,
                       std::int64_t n_packets, std::uint64_t seed, bool use_real_codec,
                       bool record_packets) {
             SimConfig c;
             c.channel = channel;
             c.coding = coding;
             c.mode = mode;
             c.n_packets = n_packets;
             c.seed = seed;
             c.use_real_codec = use_real_codec;
             c.record_packets = record_packets;
             return c;
           }),
           py::arg("channel"), py::arg("coding"), py::arg("mode") = SimMode::kIdealized,
           py::arg("n_packets") = 100000, py::arg("seed") = 0, py::arg("use_real_codec") = false,
           py::arg("record_packets") = false)
      .def_readwrite("mode", &SimConfig::mode)
      .def_readwrite("n_packets", &SimConfig::n_packets)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("use_real_codec", &SimConfig::use_real_codec)
      .def_readwrite("hol_cap", &SimConfig::hol_cap)
      .def_readwrite("record_packets", &SimConfig::record_packets);

  py::class_<SimStats>(m, "SimStats")
      .def_readonly("mean_delay", &SimStats::mean_delay)
      .def_readonly("std_delay", &SimStats::std_delay)
      .def_readonly("mean_delay_se", &SimStats::mean_delay_se)
      .def_readonly("delay_count", &SimStats::delay_count)
      .def_readonly("mean_efficiency", &SimStats::mean_efficiency)
      .def_readonly("received_mean", &SimStats::received_mean)
      .def_readonly("generations", &SimStats::generations)
      .def_readonly("innovation_failures", &SimStats::innovation_failures)
      .def_readonly("round_histogram", &SimStats::round_histogram)
      .def_readonly("packets", &SimStats::packets)
      .def_readonly("replications", &SimStats::replications);
  m.def("run_coded", &run_coded, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_arq", &run_arq, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "replicate",
      [](const SimConfig& config, int reps, bool arq) {
        return replicate(config, reps, arq ? SimProtocol::kArq : SimProtocol::kCoded);
      },
      py::arg("config"), py::arg("reps"), py::arg("arq") = false,
      py::call_guard<py::gil_scoped_release>());

  py::class_<CounterRng>(m, "CounterRng")
      .def(py::init([](std::uint64_t seed, std::uint64_t stream) { return CounterRng::derive(seed, stream); }),
           py::arg("seed"), py::arg("stream") = 0)
      .def("next", &CounterRng::next)
      .def("uniform", &CounterRng::uniform);

  py::class_<CodedPacket>(m, "CodedPacket")
      .def_readonly("generation_id", &CodedPacket::generation_id)
      .def_property_readonly("is_systematic", &CodedPacket::is_systematic)
      .def_property_readonly("payload", [](const CodedPacket& p) { return to_py(p.payload); });

  py::class_<Encoder>(m, "Encoder")
      .def(py::init([](std::uint32_t generation_id, const std::vector<py::bytes>& payloads) {
             std::vector<Bytes> data;
             for (const auto& p : payloads) data.push_back(from_py(p));
             return Encoder(generation_id, std::move(data));
           }),
           py::arg("generation_id"), py::arg("payloads"))
      .def_property_readonly("k", &Encoder::k)
      .def("systematic", &Encoder::systematic, py::arg("index"))
      .def("coded", &Encoder::coded, py::arg("rng"));

  py::class_<Decoder>(m, "Decoder")
      .def(py::init<std::uint32_t, int, std::size_t>(), py::arg("generation_id"), py::arg("k"),
           py::arg("payload_size"))
      .def("ingest", &Decoder::ingest, py::arg("packet"))
      .def_property_readonly("rank", &Decoder::rank)
      .def_property_readonly("complete", &Decoder::complete)
      .def("deliverable_prefix", &Decoder::deliverable_prefix)
      .def("decode", [](const Decoder& d) {
        std::vector<py::bytes> out;
        for (const Bytes& b : d.decode()) out.push_back(to_py(b));
        return out;
      });

  m.def(
      "serialize", [](const CodedPacket& p, int k) { return to_py(serialize(p, k)); },
      py::arg("packet"), py::arg("k"));
  m.def(
      "deserialize",
      [](const py::bytes& data, int k) {
        const Bytes b = from_py(data);
        return deserialize(b, k);
      },
      py::arg("data"), py::arg("k"));
}
