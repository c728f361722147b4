#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpa/dynamics.hpp"
#include "fpa/montecarlo.hpp"
#include "fpa/types.hpp"

namespace fpa {

using nlohmann::json;

inline LearnerKind learner_kind_from(const std::string& s) {
  if (s == "ftl") return LearnerKind::FTL;
  if (s == "eps-greedy") return LearnerKind::EpsGreedy;
  if (s == "mwu") return LearnerKind::MWU;
  if (s == "counterexample") return LearnerKind::Counterexample;
  if (s == "scripted") return LearnerKind::Scripted;
  throw std::domain_error("unknown learner kind: " + s);
}

inline TieBreak tiebreak_from(const std::string& s) {
  if (s == "lowest") return TieBreak::LowestBid;
  if (s == "highest") return TieBreak::HighestBid;
  if (s == "round-robin") return TieBreak::RoundRobin;
  if (s == "scripted") return TieBreak::Scripted;
  throw std::domain_error("unknown tiebreak rule: " + s);
}

inline Verdict verdict_from(const std::string& s) {
  if (s == "to-high-minus-one") return Verdict::ToHighMinusOne;
  if (s == "to-high-minus-two") return Verdict::ToHighMinusTwo;
  if (s == "not-converged") return Verdict::NotConverged;
  throw std::domain_error("unknown verdict: " + s);
}

inline json to_json(const LearnerSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["tiebreak"] = to_string(spec.tiebreak);
  j["eps_scale"] = spec.eps.scale;
  j["eps_exponent"] = spec.eps.exponent;
  j["t0"] = spec.t0;
  j["script"] = spec.script;
  return j;
}

inline LearnerSpec learner_spec_from_json(const json& j) {
  LearnerSpec spec;
  spec.kind = learner_kind_from(j.at("kind").get<std::string>());
  if (j.contains("tiebreak"))
    spec.tiebreak = tiebreak_from(j.at("tiebreak").get<std::string>());
  if (j.contains("eps_scale")) spec.eps.scale = j.at("eps_scale").get<double>();
  if (j.contains("eps_exponent"))
    spec.eps.exponent = j.at("eps_exponent").get<double>();
  if (j.contains("t0")) spec.t0 = j.at("t0").get<std::int64_t>();
  if (j.contains("script"))
    spec.script = j.at("script").get<std::vector<Bid>>();
  return spec;
}

inline json to_json(const RunConfig& cfg) {
  json j;
  j["values"] = cfg.values.values();
  j["cap"] = cfg.values.cap();
  j["rounds"] = cfg.rounds;
  j["seed"] = cfg.seed;
  j["checkpoint_stride"] = cfg.checkpoint_stride;
  j["audit"] = cfg.audit;
  json learners = json::array();
  for (const LearnerSpec& s : cfg.specs) learners.push_back(to_json(s));
  j["learners"] = learners;
  return j;
}

inline RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  std::vector<int> values = j.at("values").get<std::vector<int>>();
  cfg.values = j.contains("cap")
                   ? ValueProfile(values, j.at("cap").get<int>())
                   : ValueProfile(values);
  cfg.rounds = j.at("rounds").get<std::int64_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("checkpoint_stride"))
    cfg.checkpoint_stride = j.at("checkpoint_stride").get<std::int64_t>();
  if (j.contains("audit")) cfg.audit = j.at("audit").get<bool>();
  for (const json& s : j.at("learners"))
    cfg.specs.push_back(learner_spec_from_json(s));
  return cfg;
}

inline json to_json(const EquilibriumSet& ne) {
  json j = json::array();
  for (const BidProfile& p : ne.profiles()) j.push_back(p.bids);
  return j;
}

// run.json: config echo, verdict, terminal frequencies, and the checkpoint
// table of strategy (x) and frequency (f) snapshots.
inline json run_record_to_json(const RunRecord& rec,
                               const ConvergenceVerdict& verdict) {
  json j;
  j["config"] = to_json(rec.config);
  j["verdict"] = to_string(verdict.verdict);
  json tf = json::array();
  for (int i = 0; i < rec.config.values.num_bidders(); ++i) {
    std::vector<double> f(rec.config.values.value(i));
    for (int b = 0; b < rec.config.values.value(i); ++b)
      f[b] = rec.final_stats.f(i, b).to_double();
    tf.push_back(f);
  }
  j["terminal_frequencies"] = tf;
  json cps = json::array();
  for (const Checkpoint& cp : rec.checkpoints) {
    json c;
    c["t"] = cp.t;
    json xs = json::array();
    for (const MixedStrategy& x : cp.x) xs.push_back(x.probs);
    c["x"] = xs;
    c["f"] = cp.f;
    cps.push_back(c);
  }
  j["checkpoints"] = cps;
  return j;
}

// trace.csv: `t,bid_1,...,bid_N,in_ne`, one row per round.
inline std::string trace_to_csv(const RunRecord& rec, const EquilibriumSet& ne) {
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= rec.config.values.num_bidders(); ++i)
    out << ",bid_" << i;
  out << ",in_ne\n";
  for (std::size_t idx = 0; idx < rec.trace.size(); ++idx) {
    out << (idx + 1);
    for (Bid b : rec.trace[idx].bids) out << ',' << b;
    out << ',' << (ne.contains(rec.trace[idx]) ? 1 : 0) << '\n';
  }
  return out.str();
}

inline json batch_summary_to_json(const BatchSummary& summary) {
  json j;
  j["counts"] = {{"v_minus_1", summary.count_high_minus_one},
                 {"v_minus_2", summary.count_high_minus_two},
                 {"not_converged", summary.count_not_converged}};
  json runs = json::array();
  for (const RunStat& r : summary.run_stats)
    runs.push_back({{"index", r.index},
                    {"seed", r.seed},
                    {"verdict", to_string(r.verdict)}});
  j["runs"] = runs;
  return j;
}

// Per-track band CSV: `t, freq_q10, freq_median, freq_q90`.
inline std::string band_to_csv(const BatchSummary& summary,
                               const BandSeries& band) {
  std::ostringstream out;
  out << "t, freq_q10, freq_median, freq_q90\n";
  out.precision(17);
  for (std::size_t k = 0; k < summary.checkpoint_t.size(); ++k)
    out << summary.checkpoint_t[k] << ", " << band.q_lo[k] << ", "
        << band.q_med[k] << ", " << band.q_hi[k] << '\n';
  return out.str();
}

// Minimal polyline chart.  Each series shares the x grid; y is assumed to
// live in [0, 1] (frequencies).
struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> y;
};

inline std::string svg_chart(const std::vector<std::int64_t>& x,
                             const std::vector<SvgSeries>& series,
                             int width = 640, int height = 400) {
  if (x.empty()) throw std::domain_error("svg_chart: empty x grid");
  const double pad = 40.0;
  const double x0 = static_cast<double>(x.front());
  const double x1 = static_cast<double>(x.back());
  const double span = x1 > x0 ? x1 - x0 : 1.0;
  auto px = [&](double t) {
    return pad + (t - x0) / span * (width - 2 * pad);
  };
  auto py = [&](double v) { return height - pad - v * (height - 2 * pad); };

  std::ostringstream out;
  out.precision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes.
  out << "<line x1=\"" << pad << "\" y1=\"" << py(0) << "\" x2=\""
      << width - pad << "\" y2=\"" << py(0)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << py(0) << "\" x2=\"" << pad
      << "\" y2=\"" << py(1) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  int li = 0;
  for (const SvgSeries& s : series) {
    if (s.y.size() != x.size())
      throw std::domain_error("svg_chart: series length mismatch");
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < x.size(); ++k)
      out << px(static_cast<double>(x[k])) << ',' << py(s.y[k]) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << pad + 8 << "\" y=\"" << pad + 16 * li
        << "\" fill=\"" << s.color << "\" font-size=\"12\">" << s.label
        << "</text>\n";
    ++li;
  }
  out << "</svg>\n";
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Minimal TOML subset: `key = value` lines, optional [section] headers that
// prefix keys as "section.key", # comments, quoted strings, scalars, and
// flat integer arrays.  Values are returned as raw strings with quotes and
// brackets stripped; the caller interprets them.
inline std::map<std::string, std::string> parse_toml_subset(
    const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line, section;
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
  };
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::domain_error("config parse error at line " +
                                std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::domain_error("config parse error at line " +
                              std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    else if (val.size() >= 2 && val.front() == '[' && val.back() == ']')
      val = trim(val.substr(1, val.size() - 2));
    if (!section.empty()) key = section + "." + key;
    out[key] = val;
  }
  return out;
}

}  // namespace fpa
