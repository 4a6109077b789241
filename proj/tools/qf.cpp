// qf: command-line front end. JSON on stdout, JSON errors on stderr.
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qf/approx.hpp"
#include "qf/boolcompile.hpp"
#include "qf/bounds.hpp"
#include "qf/channel.hpp"
#include "qf/circuit_json.hpp"
#include "qf/corpus.hpp"
#include "qf/rewrite.hpp"
#include "qf/simulator.hpp"

namespace {

using qf::Assignment;
using qf::Circuit;
using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  bool verbose = false;
  double tol = qf::kTol;
};

Globals globals;

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

void note(const std::string& s) {
  if (globals.verbose) std::cerr << s << '\n';
}

qf::ParseOptions parse_options() {
  qf::ParseOptions o;
  o.tol = globals.tol;
  return o;
}

Circuit load(const std::string& path) { return qf::load_circuit(path, parse_options()); }

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qf::SchemaError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw qf::SchemaError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw qf::SchemaError("cannot write " + path);
  out << text;
}

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
    }
  }
  return out;
}

std::vector<std::uint8_t> parse_bits(const std::string& s) {
  std::vector<std::uint8_t> out;
  for (char c : s) {
    if (c != '0' && c != '1') throw UsageError("bit string may hold only 0 and 1: '" + s + "'");
    out.push_back(c == '1');
  }
  return out;
}

qf::Engine parse_engine(const std::string& e) {
  if (e == "auto") return qf::Engine::Auto;
  if (e == "formula") return qf::Engine::Formula;
  if (e == "statevector") return qf::Engine::Statevector;
  throw UsageError("engine must be auto, formula or statevector");
}

Json graph_json(const qf::ComputationGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"producer", e.producer}, {"consumer", e.consumer}, {"wire", e.wire}});
  }
  return {{"root", g.root}, {"nodes", g.nodes}, {"edges", edges}, {"dead", g.dead}};
}

Json error_json(const std::string& kind, const std::string& message) {
  return {{"error", kind}, {"message", message}};
}

// Decimal strings that fit in 64 bits become numbers.
Json big_number(const std::string& dec) {
  if (dec.empty()) return nullptr;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(dec, &used);
    if (used == dec.size()) return static_cast<std::uint64_t>(v);
  } catch (const std::out_of_range&) {
  }
  return dec;
}

// Subcommands

void cmd_simulate(const std::string& file, const std::string& input, const std::string& engine) {
  const Circuit c = load(file);
  const Assignment a = Assignment::parse(input);
  const qf::Engine e = parse_engine(engine);
  const bool use_formula = e == qf::Engine::Formula || (e == qf::Engine::Auto && qf::is_formula(c).formula);
  const double p = use_formula ? qf::formula_run(c, a).p : qf::statevector_run(c, a);
  note(std::string("engine: ") + (use_formula ? "formula" : "statevector"));
  emit({{"p", p}});
}

void cmd_truthtable(const std::string& file, const std::string& engine) {
  const qf::TruthTable t = qf::truthtable(load(file), parse_engine(engine), globals.threads);
  Json rows = Json::array();
  for (std::size_t r = 0; r < t.p.size(); ++r) {
    rows.push_back({{"input", Assignment::from_index(r, t.n).to_string()},
                    {"p", t.p[r]},
                    {"value", static_cast<int>(t.value[r])}});
  }
  emit({{"n", t.n}, {"total", t.is_total()}, {"undecided", t.undecided()}, {"rows", rows}});
}

void cmd_check_formula(const std::string& file) {
  const qf::FormulaCheck check = qf::is_formula(load(file));
  Json out = {{"formula", check.formula}};
  if (!check.formula) {
    out["offending_gate"] = check.offending_gate;
    Json w = Json::array();
    for (const auto& p : check.witness) w.push_back(qf::path_to_json(p));
    out["witness"] = w;
  }
  out["graph"] = graph_json(check.graph);
  emit(out);
}

void cmd_squeeze(const std::string& file, const std::string& block_s, const std::string& tau_s,
                 const std::string& out_path) {
  const Circuit f = load(file);
  const std::vector<int> block = parse_int_list(block_s, "block");
  const std::vector<std::uint8_t> tau = parse_bits(tau_s);
  const qf::SqueezeReport r = qf::squeeze_formula(f, block, tau);
  const std::size_t sj = r.decomposition.s_j;
  Json out = {{"block", block},
              {"tau", tau_s},
              {"s_j", sj},
              {"squeezed", r.squeezed},
              {"size", r.size},
              {"K", qf::kSqueezeSizeConstant},
              {"size_limit", qf::kSqueezeSizeConstant * std::max<std::size_t>(sj, 1)},
              {"ranks", r.ranks},
              {"unitarity_residuals", r.unitarity_residuals},
              {"decomposition", qf::decomposition_to_json(r.decomposition)}};
  if (!out_path.empty()) {
    write_text(out_path, qf::serialize_circuit(r.circuit));
    out["output"] = out_path;
  } else {
    out["circuit"] = qf::circuit_to_json(r.circuit);
  }
  note("squeezed " + std::to_string(r.squeezed) + " segments, size " + std::to_string(r.size));
  emit(out);
}

void cmd_truncate(const std::string& file, int bits, double eps, bool report) {
  const Circuit f = load(file);
  const qf::FormulaTree tree = qf::extract_tree(f);
  const int d = static_cast<int>(std::max<std::size_t>(tree.max_arity(), 1));
  const double s = static_cast<double>(tree.size());
  Json out;
  if (eps > 0) {
    const double ell = std::max(s, 1.0);
    const int tree_mu = qf::formula_mu(ell, eps);
    const int driven_mu = qf::bound_driven_mu(d, ell, eps);
    out["eps"] = eps;
    out["formula_mu"] = tree_mu;
    out["bound_driven_mu"] = driven_mu;
    if (bits <= 0) bits = driven_mu;
  }
  if (bits <= 0) throw UsageError("truncate needs --bits or --eps");
  const double delta = qf::truncation_delta(bits);
  out["mu"] = bits;
  out["delta"] = delta;
  out["d"] = d;
  out["s"] = tree.size();
  out["eta"] = qf::eta(d, delta);
  out["bound"] = qf::circuit_error_bound(d, delta, s);
  if (report) {
    const qf::TruncationReport r = qf::verify_truncation(f, bits);
    out["measured"] = {{"trace_dist", r.measured_trace_dist}, {"p_dev", r.measured_p_dev}};
    out["pass"] = r.pass;
  }
  emit(out);
}

void cmd_compile_bool(const std::string& file, int bits, int extra, const std::string& out_path) {
  const qf::Netlist n = qf::compile_formula(load(file), bits, qf::CompileOptions{extra});
  const Json doc = qf::netlist_to_json(n);
  if (out_path.empty()) {
    emit(doc);
    return;
  }
  write_text(out_path, doc.dump() + "\n");
  const qf::NetlistStats st = qf::netlist_stats(n);
  emit({{"mu", n.mu},
        {"W", n.width},
        {"size", st.size},
        {"depth", st.depth},
        {"breakdown", st.breakdown},
        {"output", out_path}});
}

void cmd_eval_netlist(const std::string& file, const std::string& input) {
  const qf::Netlist n = qf::netlist_from_json(read_json(file));
  if (!input.empty()) {
    const qf::NetlistValue v = qf::eval_netlist(n, Assignment::parse(input));
    emit({{"word", v.word}, {"p", v.p}});
    return;
  }
  Json rows = Json::array();
  const auto all = qf::eval_netlist_all(n);
  for (std::size_t r = 0; r < all.size(); ++r) {
    rows.push_back({{"input", Assignment::from_index(r, static_cast<int>(n.inputs.size())).to_string()},
                    {"word", all[r].word},
                    {"p", all[r].p}});
  }
  emit({{"rows", rows}});
}

void cmd_dilate(const std::string& file, int samples) {
  const qf::SuperOp t = qf::channel_from_json(read_json(file));
  const qf::Dilation d = qf::stinespring_dilation(t, std::max(globals.tol, 1e-8));
  qf::Rng rng(globals.seed);
  double worst = 0;
  for (int k = 0; k < samples; ++k) {
    const qf::CMatrix rho = qf::random_density(t.dim_in(), rng);
    worst = std::max(worst, qf::max_abs_diff(d.apply(rho), t.apply(rho)));
  }
  emit({{"dim_in", d.dim_in},
        {"dim_out", d.dim_out},
        {"ancilla_in", d.ancilla_in},
        {"traced_out", d.traced_out},
        {"kraus_rank", d.kraus_rank},
        {"unitarity_residual", qf::unitarity_residual(d.unitary)},
        {"samples", samples},
        {"max_error", worst},
        {"unitary", qf::matrix_to_json(d.unitary)}});
}

qf::PartitionSpec parse_partition(const std::string& s) {
  qf::PartitionSpec p;
  std::stringstream ss(s);
  std::string block;
  while (std::getline(ss, block, ';')) p.blocks.push_back(parse_int_list(block, "partition"));
  return p;
}

Json nechiporuk_json(const qf::NechiporukReport& r) {
  Json blocks = Json::array();
  for (const auto& b : r.blocks) {
    blocks.push_back({{"sigma", b.sigma}, {"exact", b.exact}, {"term", b.term}, {"skipped", b.skipped}});
  }
  return {{"blocks", blocks}, {"skipped", r.skipped}, {"total", r.total}};
}

void cmd_nechiporuk(const std::string& sigmas, int ell, const std::string& file,
                    const std::string& partition, bool sampled, std::uint64_t samples) {
  const int sources = !sigmas.empty() + (ell > 0) + !file.empty();
  if (sources != 1) throw UsageError("give exactly one of --sigmas, --ed or --circuit");
  if (!sigmas.empty()) {
    std::vector<std::uint64_t> v;
    for (int s : parse_int_list(sigmas, "sigma")) {
      if (s < 1) throw UsageError("sigma values must be at least 1");
      v.push_back(static_cast<std::uint64_t>(s));
    }
    emit(nechiporuk_json(qf::nechiporuk_bound(v)));
    return;
  }
  qf::BooleanFunction f;
  qf::PartitionSpec p;
  if (ell > 0) {
    f = qf::ed_function(ell);
    p = qf::PartitionSpec::ed(ell);
  } else {
    if (partition.empty()) throw UsageError("--circuit needs --partition");
    f = qf::function_from_truthtable(qf::truthtable(load(file), qf::Engine::Auto, globals.threads));
    p = parse_partition(partition);
  }
  p.validate(f.n);
  const qf::CountMode mode = sampled ? qf::CountMode::Sampled : qf::CountMode::Exhaustive;
  std::vector<std::uint64_t> sig;
  std::vector<bool> exact;
  for (std::size_t j = 0; j < p.blocks.size(); ++j) {
    const qf::SubfunctionCount c =
        qf::subfunction_count(f, p, j, mode, samples, globals.seed, globals.threads);
    sig.push_back(c.sigma);
    exact.push_back(c.exact);
  }
  emit(nechiporuk_json(qf::nechiporuk_bound(sig, exact)));
}

void cmd_ed_sigma(int ell) {
  const qf::EdSigmaLower e = qf::ed_sigma_lower(ell);
  emit({{"ell", e.ell},
        {"binom", big_number(e.binom)},
        {"power", big_number(e.power)},
        {"log2_binom", e.log2_binom},
        {"log2_power", e.log2_power},
        {"strict", e.strict},
        {"exact", e.exact}});
}

void cmd_warren(double d, double m, double t) {
  if (d < 1 || m < 1 || t < 1) throw UsageError("warren needs d, m, t >= 1");
  emit({{"d", d}, {"m", m}, {"t", t}, {"log2_count", qf::warren_count(d, m, t)}});
}

void cmd_appendix(int n, int N, int d) {
  if (n < 1 || N < 1 || d < 1) throw UsageError("appendix needs n, N, d >= 1");
  const qf::AppendixCount a = qf::appendix_count(n, N, d);
  Json out = {{"n", a.n},
              {"N", a.N},
              {"d", a.d},
              {"mu", a.mu},
              {"log2_classes", a.log2_classes},
              {"log2_signs", a.log2_signs},
              {"log2_total", a.log2_total},
              {"hypothesis_ok", a.hypothesis_ok}};
  if (!a.warning.empty()) {
    out["warning"] = a.warning;
    std::cerr << a.warning << '\n';
  }
  emit(out);
}

int run(int argc, char** argv) {
  CLI::App app{"Quantum formula toolkit"};
  app.require_subcommand(1);
  app.add_option("--seed", globals.seed, "Seed for randomized procedures")->capture_default_str();
  app.add_option("--threads", globals.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--verbose", globals.verbose, "Human-readable notes on stderr");

  std::string file, input, engine = "auto", out_path, block, tau, sigmas, partition;
  int bits = 0, extra = 8, ell = 0, samples_dilate = 50, n = 0, N = 0, dd = 0;
  double eps = 0, wd = 0, wm = 0, wt = 0;
  bool report = false, sampled = false;
  std::uint64_t samples = 4096;

  auto* sim = app.add_subcommand("simulate", "Acceptance probability on one input");
  sim->add_option("circuit", file)->required();
  sim->add_option("--input", input, "Bit string, x0 first")->required();
  sim->add_option("--engine", engine)->check(CLI::IsMember({"auto", "formula", "statevector"}));

  auto* tt = app.add_subcommand("truthtable", "Probabilities on every input");
  tt->add_option("circuit", file)->required();
  tt->add_option("--engine", engine)->check(CLI::IsMember({"auto", "formula", "statevector"}));

  auto* chk = app.add_subcommand("check-formula", "Formula test with a witness");
  chk->add_option("circuit", file)->required();

  auto* sq = app.add_subcommand("squeeze", "Substitute outside variables and squeeze paths");
  sq->add_option("circuit", file)->required();
  sq->add_option("--block", block, "Comma-separated variable indices")->required();
  sq->add_option("--tau", tau, "Bits for the other variables, ascending index")->required();
  sq->add_option("-o,--output", out_path, "Write the squeezed circuit here");

  auto* tr = app.add_subcommand("truncate", "Gate truncation error budget");
  tr->add_option("circuit", file)->required();
  tr->add_option("--bits", bits, "Fractional bits mu")->check(CLI::Range(1, 60));
  tr->add_option("--eps", eps, "Target error; reports both mu rules")->check(CLI::PositiveNumber);
  tr->add_flag("--report", report, "Measure the error on every input");

  auto* cb = app.add_subcommand("compile-bool", "Compile a formula to a Boolean netlist");
  cb->add_option("circuit", file)->required();
  cb->add_option("--bits", bits, "Fractional bits mu")->required()->check(CLI::Range(1, 40));
  cb->add_option("--extra-width", extra, "W - mu")->check(CLI::Range(2, 23))->capture_default_str();
  cb->add_option("-o,--output", out_path, "Write the netlist here");

  auto* ev = app.add_subcommand("eval-netlist", "Evaluate a netlist");
  ev->add_option("netlist", file)->required();
  ev->add_option("--input", input, "Bit string; all inputs when omitted");

  auto* dl = app.add_subcommand("dilate", "Stinespring dilation of a channel");
  dl->add_option("channel", file)->required();
  dl->add_option("--samples", samples_dilate, "Random states to check")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  auto* bd = app.add_subcommand("bounds", "Lower-bound and counting arithmetic");
  bd->require_subcommand(1);
  auto* ne = bd->add_subcommand("nechiporuk", "Nechiporuk sum");
  ne->add_option("--sigmas", sigmas, "Comma-separated subfunction counts");
  ne->add_option("--ed", ell, "Element distinctness with ell strings");
  ne->add_option("--circuit", file, "Circuit whose truth table is counted");
  ne->add_option("--partition", partition, "Blocks as '0,1;2,3'");
  ne->add_flag("--sampled", sampled, "Random outside settings, a lower bound");
  ne->add_option("--samples", samples)->capture_default_str();
  auto* es = bd->add_subcommand("ed-sigma", "C(ell^2, ell-1) against ell^(ell-1)");
  es->add_option("--ell", ell)->required();
  auto* wa = bd->add_subcommand("warren", "log2 of (4edm/t)^t");
  wa->add_option("--d", wd)->required();
  wa->add_option("--m", wm)->required();
  wa->add_option("--t", wt)->required();
  auto* ap = bd->add_subcommand("appendix", "Sign-assignment count for n inputs, N gates");
  ap->add_option("--n", n)->required();
  ap->add_option("--N", N)->required();
  ap->add_option("--d", dd)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("usage", e.what()).dump() << '\n';
    return 2;
  }

  if (const char* env = std::getenv("QF_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) {
      std::cerr << error_json("usage", std::string("QF_TOL must be a positive number, got '") + env + "'").dump() << '\n';
      return 2;
    }
    globals.tol = v;
  }

  if (*sim) cmd_simulate(file, input, engine);
  else if (*tt) cmd_truthtable(file, engine);
  else if (*chk) cmd_check_formula(file);
  else if (*sq) cmd_squeeze(file, block, tau, out_path);
  else if (*tr) cmd_truncate(file, bits, eps, report);
  else if (*cb) cmd_compile_bool(file, bits, extra, out_path);
  else if (*ev) cmd_eval_netlist(file, input);
  else if (*dl) cmd_dilate(file, samples_dilate);
  else if (*ne) cmd_nechiporuk(sigmas, ell, file, partition, sampled, samples);
  else if (*es) cmd_ed_sigma(ell);
  else if (*wa) cmd_warren(wd, wm, wt);
  else if (*ap) cmd_appendix(n, N, dd);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << error_json("usage", e.what()).dump() << '\n';
    return 2;
  } catch (const qf::NotFormulaError& e) {
    Json err = error_json(qf::to_string(e.kind()), e.what());
    err["offending_gate"] = e.check().offending_gate;
    Json w = Json::array();
    for (const auto& p : e.check().witness) w.push_back(qf::path_to_json(p));
    err["witness"] = w;
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const qf::UnitarityError& e) {
    Json err = error_json(qf::to_string(e.kind()), e.what());
    err["residual"] = e.residual();
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const qf::NotCpError& e) {
    Json err = error_json(qf::to_string(e.kind()), e.what());
    err["eigenvalue"] = e.eigenvalue();
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const qf::Error& e) {
    std::cerr << error_json(qf::to_string(e.kind()), e.what()).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()).dump() << '\n';
    return 1;
  }
}
