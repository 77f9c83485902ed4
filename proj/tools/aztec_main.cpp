#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aztec/asymptotics.hpp"
#include "aztec/dynamics.hpp"
#include "aztec/io.hpp"
#include "aztec/kernels.hpp"
#include "aztec/rational.hpp"
#include "aztec/rng.hpp"
#include "aztec/shuffling.hpp"
#include "aztec/stats.hpp"

namespace {

using namespace aztec;

// Thrown for well-formed commands applied to arguments that make no sense
// (unparseable states, wrong particle counts); reported as usage errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<long> parse_positions(const std::string& text) {
  std::vector<long> values;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    try {
      size_t used = 0;
      values.push_back(std::stol(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw UsageError("cannot read position \"" + token + "\" in \"" + text + "\"");
    }
  }
  if (values.empty()) throw UsageError("empty position list \"" + text + "\"");
  return values;
}

// "x_1,...,x_{n+1};y_1,...,y_n" -> two-line state.
TwoLineState parse_two_line(const std::string& text) {
  const size_t split = text.find(';');
  if (split == std::string::npos) {
    throw UsageError("two-line state \"" + text + "\" needs the form \"x-list;y-list\"");
  }
  TwoLineState state;
  state.x = parse_positions(text.substr(0, split));
  state.y = parse_positions(text.substr(split + 1));
  return state;
}

// Writes content to the path, with "-" meaning stdout.  Returns true when a
// real file was written.
bool write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return false;
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
  return true;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (!in) throw std::runtime_error("cannot read " + path);
  return buffer.str();
}

void print_summary(const stats::StatReport& report) {
  std::cerr << report.name << ": statistic=" << report.statistic
            << " threshold=" << report.threshold << " samples=" << report.samples << ' '
            << (report.pass ? "PASS" : "FAIL") << '\n';
  for (const auto& [key, value] : report.metadata) {
    std::cerr << "  " << key << " = " << value << '\n';
  }
}

// Emits the report as JSON (stdout or file) plus a human summary on stderr;
// the exit code says whether the validated property held.
int finish_validate(const stats::StatReport& report, const io::Provenance& origin,
                    const std::string& output) {
  print_summary(report);
  if (write_text(output, io::serialize(report, origin) + "\n")) {
    std::cout << output << '\n';
  }
  return report.pass ? 0 : 1;
}

// Exact identity suite for the two-line kernels: stochasticity of the
// conditioned kernel, time-zero degeneracy, lower-line marginalization,
// intertwining with the uniform-filling kernel, the one-step determinant
// recursion, and Chapman-Kolmogorov for the killed kernel.  All checks are
// rational, so a pass is exact.
stats::StatReport kernel_identity_suite(unsigned n, unsigned long t) {
  TwoLineState from;
  from.x.resize(n + 1);
  from.y.resize(n);
  std::iota(from.x.begin(), from.x.end(), 1);
  std::iota(from.y.begin(), from.y.end(), 1);

  const std::vector<TwoLineState> targets = kernel::reachable(t, from);
  // A deterministic spread of probe targets.
  std::vector<TwoLineState> probes{targets.front(), targets[targets.size() / 2],
                                   targets.back()};

  std::map<std::string, bool> results;

  Rational total = 0;
  for (const TwoLineState& to : targets) total += kernel::q_plus(t, from, to);
  results["stochasticity"] = total == Rational(1);

  TwoLineState shifted = from;
  for (long& v : shifted.x) ++v;
  for (long& v : shifted.y) ++v;
  results["time_zero"] =
      kernel::q(0, from, from) == Rational(1) && kernel::q(0, from, shifted) == Rational(0);

  bool marginal_ok = true;
  const auto lines = kernel::reachable_line(t, from.y);
  for (size_t i = 0; i < lines.size(); i += std::max<size_t>(1, lines.size() / 5)) {
    marginal_ok = marginal_ok &&
                  kernel::marginalize_x(t, from, lines[i]) == kernel::p_plus(t, from.y, lines[i]);
  }
  results["marginalization"] = marginal_ok;

  bool intertwine_ok = true;
  bool recursion_ok = true;
  bool chapman_ok = true;
  for (const TwoLineState& to : probes) {
    const auto [lhs, rhs] = kernel::intertwine_check(t, from.x, to);
    intertwine_ok = intertwine_ok && lhs == rhs;
    const auto [qnext, average] = kernel::recursion_check(t, from, to);
    recursion_ok = recursion_ok && qnext == average;
    if (t >= 2) {
      Rational composed = 0;
      for (const TwoLineState& mid : kernel::reachable(1, from)) {
        composed += kernel::q(1, from, mid) * kernel::q(t - 1, mid, to);
      }
      chapman_ok = chapman_ok && composed == kernel::q(t, from, to);
    }
  }
  results["intertwining"] = intertwine_ok;
  results["recursion"] = recursion_ok;
  if (t >= 2) results["chapman_kolmogorov"] = chapman_ok;

  stats::StatReport report;
  report.name = "kernel-identity-suite";
  report.samples = targets.size();
  for (const auto& [key, ok] : results) {
    report.metadata[key] = ok ? 1.0 : 0.0;
    if (!ok) report.statistic += 1.0;
  }
  report.threshold = 0.5;  // pass means zero failed identities
  report.pass = report.statistic == 0.0;
  return report;
}

std::string format_flag(const std::string& name, double value) {
  std::ostringstream s;
  s << name << '=' << value;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aztec diamond sampler, interlaced dynamics, exact two-line kernels, "
               "and limit-theorem validation"};
  app.require_subcommand(1);

  // --- sample ---------------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "Draw a uniform tiling by shuffling growth");
  unsigned sample_order = 8;
  std::uint64_t sample_seed = 0;
  std::string sample_format = "json";
  std::string sample_output;
  bool sample_particles = false;
  sample->add_option("--order", sample_order, "Diamond order")->capture_default_str();
  sample->add_option("--seed", sample_seed, "Generator seed")
      ->envname("AZTEC_SEED")
      ->capture_default_str();
  sample->add_option("--format", sample_format, "json, svg, or ascii")
      ->check(CLI::IsMember({"json", "svg", "ascii"}))
      ->capture_default_str();
  sample->add_option("--output", sample_output,
                     "Output path; - for stdout, default aztec-n<order>-s<seed>.<ext>");
  sample->add_flag("--particles", sample_particles, "Mark south/east dominoes in SVG output");

  // --- evolve ---------------------------------------------------------------
  auto* evolve = app.add_subcommand("evolve", "Run the interlaced particle dynamics");
  unsigned evolve_lines = 3;
  unsigned long evolve_steps = 10;
  std::uint64_t evolve_seed = 0;
  std::string evolve_output;
  evolve->add_option("--lines", evolve_lines, "Number of particle lines")->capture_default_str();
  evolve->add_option("--steps", evolve_steps, "Time steps")->capture_default_str();
  evolve->add_option("--seed", evolve_seed, "Generator seed")
      ->envname("AZTEC_SEED")
      ->capture_default_str();
  evolve->add_option("--output", evolve_output,
                     "Output path; - for stdout, default trajectory-n<n>-T<T>-s<seed>.json");

  // --- kernel ---------------------------------------------------------------
  auto* kernel_cmd = app.add_subcommand("kernel", "Evaluate an exact transition kernel");
  std::string kernel_mode;
  unsigned kernel_n = 1;
  unsigned long kernel_t = 1;
  std::string kernel_from, kernel_to;
  kernel_cmd->add_option("mode", kernel_mode, "q, qplus, p, or pplus")
      ->required()
      ->check(CLI::IsMember({"q", "qplus", "p", "pplus"}));
  kernel_cmd->add_option("--n", kernel_n, "Upper-line particle count")->capture_default_str();
  kernel_cmd->add_option("--t", kernel_t, "Time steps")->capture_default_str();
  kernel_cmd->add_option("--from", kernel_from, "Source state, e.g. \"1,2;1\" or \"1,2\"")
      ->required();
  kernel_cmd->add_option("--to", kernel_to, "Target state")->required();

  // --- validate -------------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "Run a validation suite");
  validate->require_subcommand(1);
  std::string validate_output = "-";
  validate->add_option("--output", validate_output, "Report path; - for stdout")
      ->capture_default_str();

  auto* vkernels = validate->add_subcommand("kernels", "Exact kernel identity suite");
  unsigned vk_n = 2;
  unsigned long vk_t = 3;
  vkernels->add_option("--n", vk_n, "Upper-line particle count")->capture_default_str();
  vkernels->add_option("--t", vk_t, "Time steps")->capture_default_str();

  auto* vgue = validate->add_subcommand("gue", "Fixed-time GUE minor comparison");
  unsigned vg_n = 2;
  unsigned long vg_t = 6400;
  std::uint64_t vg_trajectories = 4000;
  std::uint64_t vg_matrix = 20000;
  std::uint64_t vg_seed = 424242;
  double vg_threshold = 0.07;
  vgue->add_option("--n", vg_n, "Particle lines compared")->capture_default_str();
  vgue->add_option("--t", vg_t, "Observation time")->capture_default_str();
  vgue->add_option("--trajectories", vg_trajectories, "Dynamics trajectories")
      ->capture_default_str();
  vgue->add_option("--matrix-samples", vg_matrix, "GUE matrix draws")->capture_default_str();
  vgue->add_option("--seed", vg_seed, "Generator seed")
      ->envname("AZTEC_SEED")
      ->capture_default_str();
  vgue->add_option("--threshold", vg_threshold, "KS distance bound")->capture_default_str();

  auto* vdyson = validate->add_subcommand("dyson", "Diffusive-window entrance-law comparison");
  unsigned vd_line = 1;
  double vd_time = 1.0;
  unsigned vd_sweep = 10000;
  std::uint64_t vd_trials = 2500;
  std::uint64_t vd_seed = 99001;
  double vd_significance = 1e-3;
  vdyson->add_option("--line", vd_line, "Observed line (1 or 2)")->capture_default_str();
  vdyson->add_option("--time", vd_time, "Continuum time")->capture_default_str();
  vdyson->add_option("--sweep", vd_sweep, "Diffusive sweep size N")->capture_default_str();
  vdyson->add_option("--trials", vd_trials, "Trajectories per point")->capture_default_str();
  vdyson->add_option("--seed", vd_seed, "Generator seed")
      ->envname("AZTEC_SEED")
      ->capture_default_str();
  vdyson->add_option("--significance", vd_significance, "Chi-square significance")
      ->capture_default_str();

  auto* ventrance = validate->add_subcommand("entrance", "Scaled-kernel entrance-law sweep");
  unsigned ve_n = 1;
  double ve_time = 1.0;
  std::vector<unsigned> ve_sweeps{16, 64};
  double ve_ceiling = 0.05;
  ventrance->add_option("--n", ve_n, "Upper-line particle count (1 or 2)")->capture_default_str();
  ventrance->add_option("--time", ve_time, "Continuum time")->capture_default_str();
  ventrance->add_option("--sweeps", ve_sweeps, "Increasing sweep sizes")->capture_default_str();
  ventrance->add_option("--ceiling", ve_ceiling, "Final-error bound")->capture_default_str();

  // Let the shared --output be written after the chosen suite as well.
  for (CLI::App* suite : validate->get_subcommands(nullptr)) suite->fallthrough();

  // --- gue ------------------------------------------------------------------
  auto* gue = app.add_subcommand("gue", "Dump GUE minor eigenvalues as JSON lines");
  unsigned gue_dim = 3;
  std::uint64_t gue_samples = 10;
  std::uint64_t gue_seed = 1;
  gue->add_option("--dim", gue_dim, "Matrix dimension")->capture_default_str();
  gue->add_option("--samples", gue_samples, "Number of matrices")->capture_default_str();
  gue->add_option("--seed", gue_seed, "Generator seed")
      ->envname("AZTEC_SEED")
      ->capture_default_str();

  // --- render ---------------------------------------------------------------
  auto* render = app.add_subcommand("render", "Render a serialized tiling");
  std::string render_input;
  std::string render_format = "svg";
  std::string render_output = "-";
  bool render_particles = false;
  render->add_option("--input", render_input, "Tiling JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--format", render_format, "svg or ascii")
      ->check(CLI::IsMember({"svg", "ascii"}))
      ->capture_default_str();
  render->add_option("--output", render_output, "Output path; - for stdout")
      ->capture_default_str();
  render->add_flag("--particles", render_particles, "Mark south/east dominoes in SVG output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << '\n';
    return 2;
  }

  try {
    if (app.got_subcommand(sample)) {
      const DominoTiling tiling = grow(sample_order, sample_seed);
      const io::Provenance origin{
          "aztec-grow/stream-splitmix64-v1", sample_seed,
          "sample --order " + std::to_string(sample_order) + " --format " + sample_format};
      std::string content;
      std::string extension;
      if (sample_format == "json") {
        content = io::serialize(tiling, origin) + "\n";
        extension = "json";
      } else if (sample_format == "svg") {
        io::RenderOptions options;
        options.particles = sample_particles;
        content = io::render_svg(tiling, options);
        extension = "svg";
      } else {
        content = io::render_ascii(tiling);
        extension = "txt";
      }
      std::string path = sample_output.empty()
                             ? "aztec-n" + std::to_string(sample_order) + "-s" +
                                   std::to_string(sample_seed) + "." + extension
                             : sample_output;
      if (write_text(path, content)) std::cout << path << '\n';
      return 0;
    }

    if (app.got_subcommand(evolve)) {
      const io::TrajectoryFile file = io::record_trajectory(evolve_lines, evolve_steps, evolve_seed);
      std::string path = evolve_output.empty()
                             ? "trajectory-n" + std::to_string(evolve_lines) + "-T" +
                                   std::to_string(evolve_steps) + "-s" +
                                   std::to_string(evolve_seed) + ".json"
                             : evolve_output;
      if (write_text(path, io::serialize(file) + "\n")) std::cout << path << '\n';
      return 0;
    }

    if (app.got_subcommand(kernel_cmd)) {
      Rational value;
      if (kernel_mode == "q" || kernel_mode == "qplus") {
        const TwoLineState from = parse_two_line(kernel_from);
        const TwoLineState to = parse_two_line(kernel_to);
        if (from.n() != kernel_n || to.n() != kernel_n || from.x.size() != kernel_n + 1 ||
            to.x.size() != kernel_n + 1) {
          throw UsageError("state sizes disagree with --n " + std::to_string(kernel_n));
        }
        value = kernel_mode == "q" ? kernel::q(kernel_t, from, to)
                                   : kernel::q_plus(kernel_t, from, to);
      } else {
        const std::vector<long> from = parse_positions(kernel_from);
        const std::vector<long> to = parse_positions(kernel_to);
        if (from.size() != kernel_n || to.size() != kernel_n) {
          throw UsageError("line sizes disagree with --n " + std::to_string(kernel_n));
        }
        value = kernel_mode == "p" ? kernel::p(kernel_t, from, to)
                                   : kernel::p_plus(kernel_t, from, to);
      }
      std::cout << to_string(value) << " (" << to_double(value) << ")\n";
      return 0;
    }

    if (app.got_subcommand(validate)) {
      if (validate->got_subcommand(vkernels)) {
        const stats::StatReport report = kernel_identity_suite(vk_n, vk_t);
        const io::Provenance origin{"validate-kernels/exact-rational", 0,
                                    "validate kernels --n " + std::to_string(vk_n) + " --t " +
                                        std::to_string(vk_t)};
        return finish_validate(report, origin, validate_output);
      }
      if (validate->got_subcommand(vgue)) {
        const stats::StatReport report =
            asymptotics::gue_limit_report(vg_n, vg_t, vg_trajectories, vg_seed, vg_threshold,
                                          vg_matrix);
        const io::Provenance origin{
            "validate-gue/v1", vg_seed,
            "validate gue --n " + std::to_string(vg_n) + " --t " + std::to_string(vg_t) +
                " --trajectories " + std::to_string(vg_trajectories) + " --matrix-samples " +
                std::to_string(vg_matrix) + " " + format_flag("--threshold", vg_threshold)};
        return finish_validate(report, origin, validate_output);
      }
      if (validate->got_subcommand(vdyson)) {
        if (vd_line < 1 || vd_line > 2) throw UsageError("--line must be 1 or 2");
        const stats::StatReport report = asymptotics::dyson_limit_report(
            vd_line, {vd_time}, {vd_sweep}, vd_trials, vd_seed, vd_significance);
        const io::Provenance origin{
            "validate-dyson/v1", vd_seed,
            "validate dyson --line " + std::to_string(vd_line) + " " +
                format_flag("--time", vd_time) + " --sweep " + std::to_string(vd_sweep) +
                " --trials " + std::to_string(vd_trials) + " " +
                format_flag("--significance", vd_significance)};
        return finish_validate(report, origin, validate_output);
      }
      if (validate->got_subcommand(ventrance)) {
        const stats::StatReport report = asymptotics::kernel_convergence_report(
            ve_n, ve_time, asymptotics::convergence_grid(ve_n), ve_sweeps,
            asymptotics::ConvergenceTarget::kEntrance, ve_ceiling);
        std::string sweeps_text;
        for (unsigned s : ve_sweeps) sweeps_text += " " + std::to_string(s);
        const io::Provenance origin{
            "validate-entrance/v1", 0,
            "validate entrance --n " + std::to_string(ve_n) + " " +
                format_flag("--time", ve_time) + " --sweeps" + sweeps_text + " " +
                format_flag("--ceiling", ve_ceiling)};
        return finish_validate(report, origin, validate_output);
      }
    }

    if (app.got_subcommand(gue)) {
      nlohmann::ordered_json header{{"schema", "gue-minors/1"},
                                    {"generator_id", "gue-minors/box-muller-jacobi-v1"},
                                    {"seed", gue_seed},
                                    {"dim", gue_dim},
                                    {"samples", gue_samples}};
      std::cout << header.dump() << '\n';
      for (std::uint64_t i = 0; i < gue_samples; ++i) {
        const asymptotics::GUESample draw =
            asymptotics::gue_minor_sample(gue_dim, counter_hash(gue_seed, 6, i, 0));
        nlohmann::ordered_json line{{"sample", i}, {"minors", draw.minors}};
        std::cout << line.dump() << '\n';
      }
      return 0;
    }

    if (app.got_subcommand(render)) {
      DominoTiling tiling;
      try {
        tiling = io::deserialize_tiling(read_text(render_input));
      } catch (const io::ParseError& e) {
        std::cerr << render_input << ": " << e.what() << '\n';
        return 1;
      }
      std::string content;
      if (render_format == "svg") {
        io::RenderOptions options;
        options.particles = render_particles;
        content = io::render_svg(tiling, options);
      } else {
        content = io::render_ascii(tiling);
      }
      if (write_text(render_output, content)) std::cout << render_output << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 2;
}
