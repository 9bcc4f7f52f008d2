// scma: design, analyze, decode and simulate SCMA codebooks for
// intensity-modulated links with input-dependent noise.

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scma/codebook_io.hpp"
#include "scma/decoder.hpp"
#include "scma/designer.hpp"
#include "scma/errors.hpp"
#include "scma/fixtures.hpp"
#include "scma/metrics.hpp"
#include "scma/simulator.hpp"

#ifndef SCMA_VERSION
#define SCMA_VERSION "0.0.0"
#endif

using json = nlohmann::ordered_json;
using namespace scma;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kConvergence = 3;
constexpr int kCapacity = 4;
constexpr int kDomain = 5;
constexpr int kUnderflow = 6;
constexpr int kOther = 7;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << content;
}

// Run record written beside every output file. Timestamps live here and
// nowhere else, so numeric outputs stay byte-identical across reruns.
struct Manifest {
  json doc;

  explicit Manifest(const std::string& command) {
    doc["command"] = command;
    doc["tool_version"] = SCMA_VERSION;
    doc["config"] = json::object();
    doc["seeds"] = json::array();
    doc["inputs"] = json::array();
    doc["started"] = utc_now();
  }

  void input(const std::string& path, const std::string& bytes) {
    doc["inputs"].push_back({{"path", path}, {"sha256", sha256_hex(bytes)}});
  }

  void fixture(const std::string& name) {
    const std::string text(scma::fixture(name).text);
    doc["inputs"].push_back({{"fixture", name}, {"sha256", sha256_hex(text)}});
  }

  // `out` is the primary output; "-" needs an explicit manifest path.
  void write(const std::string& out, const std::string& explicit_path) {
    std::string path = explicit_path;
    if (path.empty() && out != "-") path = out + ".manifest.json";
    if (path.empty()) return;
    doc["finished"] = utc_now();
    write_output(path, doc.dump(2) + "\n");
  }
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return format_number(v);
}

// Codebook input shared by analyze, decode and simulate.
struct CodebookSource {
  std::string path;
  std::string fixture_name;
  std::optional<double> varsigma2;
  std::optional<double> sigma2;

  void add_options(CLI::App* app, bool required = true) {
    auto* group = app->add_option_group("codebook");
    group->add_option("--cb", path, "Codebook file");
    group->add_option("--fixture", fixture_name, "Embedded fixture name");
    if (required) group->require_option(1);
    else group->require_option(0, 1);
    app->add_option("--varsigma2", varsigma2, "Override the shot-noise factor");
    app->add_option("--sigma2", sigma2, "Override the thermal noise variance");
  }

  bool given() const { return !path.empty() || !fixture_name.empty(); }

  CodebookSet load(Manifest& manifest) const {
    CodebookSet set = [&] {
      if (!fixture_name.empty()) {
        manifest.fixture(fixture_name);
        return load_fixture(fixture_name);
      }
      const std::string bytes = read_file(path);
      manifest.input(path, bytes);
      return parse_codebook(bytes);
    }();
    SystemParams p = set.params();
    if (varsigma2) p.varsigma2 = *varsigma2;
    if (sigma2) p.sigma2 = *sigma2;
    p.validate();
    return set.with_params(p);
  }
};

// Design flags shared by `design` and the design-spec files of simulate/sweep.
struct DesignArgs {
  SystemParams params;
  DesignConfig config;
  double beta_max = 30.0;
  double beta_min = 10.0;

  void add_options(CLI::App* app) {
    app->add_option("--users", params.J, "Number of users J")->capture_default_str();
    app->add_option("--res", params.K, "Number of resource elements K")->capture_default_str();
    app->add_option("--cbsize", params.M, "Codebook size M")->capture_default_str();
    app->add_option("--nonzeros", params.N, "Nonzeros per codeword N")->capture_default_str();
    app->add_option("--varsigma2", params.varsigma2, "Shot-noise factor")->capture_default_str();
    app->add_option("--sigma2", params.sigma2, "Thermal noise variance")->capture_default_str();
    app->add_option("--pe", params.Pe, "Per-user power budget")->capture_default_str();
    app->add_option("--seed", config.seed, "Seed of start 0")->capture_default_str();
    app->add_option("--starts", config.starts, "Random starts")->capture_default_str();
    app->add_option("--beta-max", beta_max, "Last beta of the schedule")->capture_default_str();
    app->add_option("--beta-min", beta_min, "First beta of the schedule")->capture_default_str();
    app->add_option("--inner-tol", config.inner_tol, "Stop a beta stage below this change")
        ->capture_default_str();
    app->add_option("--max-iters", config.max_inner_iters, "Iteration cap per beta stage")
        ->capture_default_str();
  }

  void from_json(const json& j) {
    params.J = j.value("users", params.J);
    params.K = j.value("res", params.K);
    params.M = j.value("cbsize", params.M);
    params.N = j.value("nonzeros", params.N);
    params.varsigma2 = j.value("varsigma2", params.varsigma2);
    params.sigma2 = j.value("sigma2", params.sigma2);
    params.Pe = j.value("pe", params.Pe);
    config.seed = j.value("seed", config.seed);
    config.starts = j.value("starts", config.starts);
    beta_max = j.value("beta_max", beta_max);
    beta_min = j.value("beta_min", beta_min);
    config.inner_tol = j.value("inner_tol", config.inner_tol);
    config.max_inner_iters = j.value("max_iters", config.max_inner_iters);
  }

  void finalize() {
    if (!(beta_min > 0.0) || beta_min > beta_max) {
      throw UsageError("need 0 < --beta-min <= --beta-max");
    }
    config.beta_schedule = DesignConfig::default_beta_schedule(beta_max, beta_min);
    params.validate();
    config.validate();
  }

  json to_json() const {
    return {{"users", params.J},         {"res", params.K},
            {"cbsize", params.M},        {"nonzeros", params.N},
            {"varsigma2", params.varsigma2}, {"sigma2", params.sigma2},
            {"pe", params.Pe},           {"seed", config.seed},
            {"starts", config.starts},   {"beta_min", beta_min},
            {"beta_max", beta_max},      {"inner_tol", config.inner_tol},
            {"max_iters", config.max_inner_iters}};
  }
};

json design_report(const DesignResult& r, const DesignArgs& args) {
  json stages = json::array();
  for (std::size_t t = 0; t < r.objective_trace.size(); ++t) {
    const TraceEntry& e = r.objective_trace[t];
    if (e.start != r.best_start) continue;
    const bool last = t + 1 == r.objective_trace.size() ||
                      r.objective_trace[t + 1].beta != e.beta ||
                      r.objective_trace[t + 1].start != e.start;
    if (last) stages.push_back({{"beta", e.beta}, {"iterations", e.iteration}, {"value", e.value}});
  }
  json tight = json::array();
  for (bool b : r.active_constraints.power_tight) tight.push_back(b);
  json seeds = json::array();
  for (int s = 0; s < args.config.starts; ++s) seeds.push_back(args.config.seed + s);
  return {{"final_d_min", r.final_d_min},
          {"final_objective", r.final_objective},
          {"best_start", r.best_start},
          {"start_seeds", seeds},
          {"start_objectives", r.start_objectives},
          {"objective_trace",
           {{"entries", r.objective_trace.size()}, {"best_start_stages", stages}}},
          {"active_constraints",
           {{"power_tight", tight}, {"floor_tight", r.active_constraints.floor_tight}}},
          {"nesting", "per-beta inner loop"},
          {"beta_schedule", args.config.beta_schedule},
          {"wall_time", r.wall_time}};
}

std::vector<double> parse_pe_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("bad --pe-list entry '" + item + "'");
    }
  }
  return out;
}

std::string ber_csv(const std::vector<BerPoint>& points, int J) {
  std::ostringstream os;
  os << "pe,ber_sim,ber_analytical,bits_sent,bit_errors,ci95";
  for (int j = 1; j <= J; ++j) os << ",per_user_ber_" << j;
  os << "\n";
  for (const BerPoint& p : points) {
    os << num(p.pe) << ',' << num(p.ber_sim) << ',' << num(p.ber_analytical) << ','
       << p.bits_sent << ',' << p.bit_errors << ',' << num(p.ci95_halfwidth);
    for (double u : p.per_user_ber) os << ',' << num(u);
    os << "\n";
  }
  return os.str();
}

json counts_json(const OpCounts& c) {
  return {{"exponential", c.exponential},
          {"multiplication", c.multiplication},
          {"addition", c.addition},
          {"comparison", c.comparison}};
}

// Received vectors: one per line, K comma-separated values. Blank lines,
// '#' comments and a non-numeric header line are skipped.
std::vector<Eigen::VectorXd> read_vectors(const std::string& text, int K) {
  std::vector<Eigen::VectorXd> out;
  std::stringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::logic_error&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (out.empty() && number == 1) continue;  // header
      throw FormatError("line " + std::to_string(number) + ": not a numeric row");
    }
    if (static_cast<int>(values.size()) != K) {
      throw DimensionError("line " + std::to_string(number) + ": expected " + std::to_string(K) +
                           " values");
    }
    out.push_back(Eigen::Map<Eigen::VectorXd>(values.data(), K));
  }
  return out;
}

struct SimArgs {
  int iters = 6;
  std::int64_t min_errors = 200;
  std::int64_t max_frames = 2'000'000;
  std::uint64_t seed = 0;
  bool log_det = false;

  void add_options(CLI::App* app) {
    app->add_option("--seed", seed, "Simulation seed")->capture_default_str();
    app->add_option("--min-errors", min_errors, "Stop at this many bit errors (0: off)")
        ->capture_default_str();
    app->add_option("--max-frames", max_frames, "Stop at this many frames (0: off)")
        ->capture_default_str();
    app->add_option("--iters", iters, "Decoder iterations")->capture_default_str();
    app->add_flag("--log-det", log_det, "Include the log-normalizer in decoder metrics");
  }

  SimulationConfig config() const {
    SimulationConfig c;
    c.n_iters = iters;
    c.min_bit_errors = min_errors > 0 ? std::optional<std::int64_t>(min_errors) : std::nullopt;
    c.max_frames = max_frames > 0 ? std::optional<std::int64_t>(max_frames) : std::nullopt;
    c.seed = seed;
    c.include_log_det = log_det;
    c.validate();
    return c;
  }

  json to_json() const {
    return {{"iters", iters},   {"min_errors", min_errors}, {"max_frames", max_frames},
            {"seed", seed},     {"log_det", log_det},
            {"rng", "mt19937_64 via seed_seq(seed, block); std::normal_distribution"}};
  }
};

int run(int argc, char** argv) {
  CLI::App app{"SCMA codebook workbench for intensity-modulated links"};
  app.set_version_flag("--version", std::string("scma ") + SCMA_VERSION);
  app.require_subcommand(1);

  // fixtures
  auto* fx = app.add_subcommand("fixtures", "List or export the embedded reference codebooks");
  fx->require_subcommand(1);
  auto* fx_list = fx->add_subcommand("list", "List embedded fixtures");
  auto* fx_export = fx->add_subcommand("export", "Write a fixture as a codebook file");
  std::string fx_name, fx_out = "-";
  fx_export->add_option("name", fx_name, "Fixture name")->required();
  fx_export->add_option("--out,-o", fx_out, "Output file")->capture_default_str();

  // design
  auto* dz = app.add_subcommand("design", "Design codebooks by beta continuation");
  DesignArgs dz_args;
  dz_args.add_options(dz);
  std::string dz_out = "-", dz_report, dz_manifest;
  dz->add_option("--out,-o", dz_out, "Codebook output file")->capture_default_str();
  dz->add_option("--report", dz_report, "Design report JSON (default: <out>.report.json)");
  dz->add_option("--manifest", dz_manifest, "Manifest path (default: <out>.manifest.json)");

  // analyze
  auto* an = app.add_subcommand("analyze", "Distance report and equal-density ellipses");
  CodebookSource an_src;
  an_src.add_options(an);
  std::string an_out = "-", an_pairs, an_ellipses, an_manifest;
  int an_bins = 0;
  double an_conf = 0.95;
  an->add_option("--out,-o", an_out, "Summary JSON")->capture_default_str();
  an->add_option("--pairs", an_pairs, "Write pair_i,pair_j,red CSV");
  an->add_option("--ellipses", an_ellipses, "Write ellipse CSV");
  an->add_option("--confidence", an_conf, "Ellipse confidence")->capture_default_str();
  an->add_option("--histogram", an_bins, "Histogram bins in the summary (0: none)");
  an->add_option("--manifest", an_manifest, "Manifest path");

  // decode
  auto* dc = app.add_subcommand("decode", "Detect received vectors");
  CodebookSource dc_src;
  dc_src.add_options(dc);
  std::string dc_in, dc_out = "-", dc_counts, dc_variant = "max-log", dc_manifest;
  int dc_iters = 6;
  bool dc_log_det = false;
  dc->add_option("--input,-i", dc_in, "CSV of received vectors (K values per row)")->required();
  dc->add_option("--out,-o", dc_out, "Bits and LLRs CSV")->capture_default_str();
  dc->add_option("--iters", dc_iters, "Iterations")->capture_default_str();
  dc->add_option("--variant", dc_variant, "max-log or mpa")
      ->check(CLI::IsMember({"max-log", "mpa"}))
      ->capture_default_str();
  dc->add_flag("--log-det", dc_log_det, "Max-Log: include the log-normalizer");
  dc->add_option("--counts", dc_counts, "Write RN-update operation counts JSON ('-': stdout)");
  dc->add_option("--manifest", dc_manifest, "Manifest path");

  // simulate / sweep
  auto* sm = app.add_subcommand("simulate", "Monte Carlo BER at one power level");
  auto* sw = app.add_subcommand("sweep", "BER over a list of power levels");
  struct SimCommand {
    CodebookSource src;
    std::string design_spec;
    SimArgs sim;
    std::string out = "-", manifest;
    std::optional<double> pe;
    std::string pe_list, mode = "scale";
  };
  SimCommand sm_cmd, sw_cmd;
  for (auto [cmd, c] : {std::pair{sm, &sm_cmd}, std::pair{sw, &sw_cmd}}) {
    c->src.add_options(cmd, false);
    cmd->add_option("--design-spec", c->design_spec, "JSON design flags; design before simulating");
    c->sim.add_options(cmd);
    cmd->add_option("--out,-o", c->out, "BER CSV")->capture_default_str();
    cmd->add_option("--manifest", c->manifest, "Manifest path");
  }
  sm->add_option("--pe", sm_cmd.pe, "Scale the codebook to this power first");
  sw->add_option("--pe-list", sw_cmd.pe_list, "Comma-separated increasing powers")->required();
  sw->add_option("--mode", sw_cmd.mode, "scale or redesign")
      ->check(CLI::IsMember({"scale", "redesign"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (fx_list->parsed()) {
    for (const FixtureInfo& f : fixtures()) std::cout << f.name << '\t' << f.description << '\n';
    return kOk;
  }
  if (fx_export->parsed()) {
    write_output(fx_out, std::string(fixture(fx_name).text));
    return kOk;
  }

  if (dz->parsed()) {
    Manifest manifest("design");
    dz_args.finalize();
    manifest.doc["config"] = dz_args.to_json();
    for (int s = 0; s < dz_args.config.starts; ++s) manifest.doc["seeds"].push_back(dz_args.config.seed + s);
    const DesignResult r = design(dz_args.params, dz_args.config);
    write_output(dz_out, serialize_codebook(r.set));
    const std::string report = design_report(r, dz_args).dump(2) + "\n";
    if (!dz_report.empty()) write_output(dz_report, report);
    else if (dz_out != "-") write_output(dz_out + ".report.json", report);
    else std::cerr << report;
    manifest.write(dz_out, dz_manifest);
    return kOk;
  }

  if (an->parsed()) {
    Manifest manifest("analyze");
    const CodebookSet set = an_src.load(manifest);
    const double v = set.params().varsigma2;
    manifest.doc["config"] = {{"varsigma2", v}, {"sigma2", set.params().sigma2}, {"confidence", an_conf}};
    const SuperConstellation sc = enumerate_superimposed(set);
    const DistanceReport report = pairwise_report(sc, v, an_bins);
    json summary = {{"d_min", report.d_min}, {"d_max", report.d_max}, {"pair_count", report.pair_count}};
    if (report.histogram) {
      summary["histogram"] = {{"lower", report.histogram->lower},
                              {"upper", report.histogram->upper},
                              {"counts", report.histogram->counts}};
    }
    write_output(an_out, summary.dump(2) + "\n");
    if (!an_pairs.empty()) {
      std::ostringstream os;
      os << "pair_i,pair_j,red\n";
      for_each_red(sc, v, [&](int i, int j, double d) { os << i + 1 << ',' << j + 1 << ',' << num(d) << '\n'; });
      write_output(an_pairs, os.str());
    }
    if (!an_ellipses.empty()) {
      std::ostringstream os;
      os << "user,point,center_1,center_2,a_1,a_2\n";
      for (const Codebook& b : set.books()) {
        for (const EpdEllipse& e : epd_ellipses(b, set.params().sigma2, v, an_conf)) {
          os << e.user + 1 << ',' << e.point + 1 << ',' << num(e.center(0)) << ',' << num(e.center(1))
             << ',' << num(e.semi_axes(0)) << ',' << num(e.semi_axes(1)) << '\n';
        }
      }
      write_output(an_ellipses, os.str());
    }
    manifest.write(an_out, an_manifest);
    return kOk;
  }

  if (dc->parsed()) {
    Manifest manifest("decode");
    const CodebookSet set = dc_src.load(manifest);
    const SystemParams& p = set.params();
    const std::string bytes = read_file(dc_in);
    manifest.input(dc_in, bytes);
    manifest.doc["config"] = {{"iters", dc_iters}, {"variant", dc_variant}, {"log_det", dc_log_det}};
    const std::vector<Eigen::VectorXd> ys = read_vectors(bytes, p.K);
    const int b = p.bits_per_symbol();
    DecoderOptions options;
    options.n_iters = dc_iters;
    options.include_log_det = dc_log_det;
    std::optional<MaxLogMpaDecoder> decoder;
    if (dc_variant == "max-log") decoder.emplace(set, options);
    OpCounts counts;
    std::ostringstream os;
    os << "vector,user,symbol,bits";
    for (int k = 1; k <= b; ++k) os << ",llr_" << k;
    os << '\n';
    for (std::size_t v = 0; v < ys.size(); ++v) {
      const DecoderState s = decoder ? decoder->decode(ys[v], &counts) : mpa_linear(ys[v], set, dc_iters, &counts);
      for (int j = 0; j < p.J; ++j) {
        os << v + 1 << ',' << j + 1 << ',' << s.symbols[j] + 1 << ',';
        for (int k = 0; k < b; ++k) os << s.hard_bits(j, k);
        for (int k = 0; k < b; ++k) os << ',' << num(s.llrs(j, k));
        os << '\n';
      }
    }
    write_output(dc_out, os.str());
    if (!dc_counts.empty()) {
      json c = {{"vectors", ys.size()}, {"instrumented", counts_json(counts)}};
      if (set.graph().is_regular() && (dc_variant == "mpa" || !set.graph().is_tree())) {
        // Trees may exit early, so the closed form only applies to cyclic graphs for Max-Log.
        const int d = set.graph().degrees()(0);
        OpCounts per = op_counts(p.M, d, p.K, dc_iters,
                                 dc_variant == "mpa" ? DecoderVariant::Mpa : DecoderVariant::MaxLog);
        OpCounts total;
        for (std::size_t v = 0; v < ys.size(); ++v) total += per;
        c["closed_form_per_vector"] = counts_json(per);
        c["match"] = total == counts;
      }
      write_output(dc_counts, c.dump(2) + "\n");
    }
    manifest.write(dc_out, dc_manifest);
    return kOk;
  }

  if (sm->parsed() || sw->parsed()) {
    const bool is_sweep = sw->parsed();
    SimCommand& c = is_sweep ? sw_cmd : sm_cmd;
    Manifest manifest(is_sweep ? "sweep" : "simulate");
    if (c.src.given() == !c.design_spec.empty()) {
      throw UsageError("give exactly one of --cb, --fixture or --design-spec");
    }
    const SimulationConfig sim = c.sim.config();
    json config = c.sim.to_json();
    manifest.doc["seeds"].push_back(c.sim.seed);

    std::optional<DesignArgs> spec;
    std::optional<CodebookSet> set;
    if (!c.design_spec.empty()) {
      const std::string bytes = read_file(c.design_spec);
      manifest.input(c.design_spec, bytes);
      spec.emplace();
      try {
        spec->from_json(json::parse(bytes));
      } catch (const json::exception& e) {
        throw FormatError(std::string("design spec: ") + e.what());
      }
      spec->finalize();
      config["design"] = spec->to_json();
    } else {
      set = c.src.load(manifest);
    }

    std::vector<BerPoint> points;
    int J = 0;
    if (is_sweep) {
      const std::vector<double> pes = parse_pe_list(c.pe_list);
      const SweepMode mode = sweep_mode_from_string(c.mode);
      config["pe_list"] = pes;
      config["mode"] = c.mode;
      if (spec) {
        J = spec->params.J;
        if (mode == SweepMode::Scale) {
          points = sweep(design(spec->params, spec->config).set, pes, mode, sim, spec->config);
        } else {
          points = sweep(spec->params, pes, sim, spec->config);
        }
      } else {
        J = set->params().J;
        points = sweep(*set, pes, mode, sim);
      }
    } else {
      CodebookSet target = spec ? design(spec->params, spec->config).set : *set;
      if (c.pe) target = scale_codebook_set(target, *c.pe);
      config["pe"] = target.params().Pe;
      J = target.params().J;
      points.push_back(simulate_ber(target, sim));
    }
    manifest.doc["config"] = config;
    write_output(c.out, ber_csv(points, J));
    manifest.write(c.out, c.manifest);
    return kOk;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IndexError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConvergence;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCapacity;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const UnderflowError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnderflow;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}
