// pt: command-line front end for the pattern-model toolkit. One subcommand
// per module; every stochastic command takes an explicit --seed and every
// artifact records the command line that produced it.
#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pt/beliefprop.hpp"
#include "pt/csv.hpp"
#include "pt/diffusion.hpp"
#include "pt/errors.hpp"
#include "pt/gibbs.hpp"
#include "pt/hmm.hpp"
#include "pt/image.hpp"
#include "pt/image_stats.hpp"
#include "pt/kalman.hpp"
#include "pt/model_io.hpp"
#include "pt/particle.hpp"
#include "pt/pcfg.hpp"
#include "pt/rng.hpp"
#include "pt/shape.hpp"
#include "pt/synthesis.hpp"
#include "pt/version.hpp"

namespace {

std::string g_command_line;

std::string stamp(std::uint64_t seed) {
  std::ostringstream out;
  out << "pt " << pt::kVersion << " seed=" << seed << " cmd=\"" << g_command_line
      << "\"";
  return out.str();
}

std::string stamp_no_seed() {
  std::ostringstream out;
  out << "pt " << pt::kVersion << " cmd=\"" << g_command_line << "\"";
  return out.str();
}

// Image writer keyed on the output extension (.pgm quantizes, .ptf is
// lossless float).
void write_image_auto(const pt::ImageGrid& img, const std::string& path,
                      const std::string& comment) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".ptf") {
    pt::write_ptf(img, path);
  } else if (ext == ".pgm") {
    pt::write_pgm(img, path, comment);
  } else {
    throw pt::DataError("unsupported image extension (use .pgm or .ptf): " + path);
  }
}

std::vector<int> parse_yield(const pt::Pcfg& grammar, const std::string& text) {
  std::vector<std::string> tokens;
  if (text.find(' ') != std::string::npos || text.find(',') != std::string::npos) {
    std::string token;
    for (char c : text) {
      if (c == ' ' || c == ',') {
        if (!token.empty()) tokens.push_back(token);
        token.clear();
      } else {
        token += c;
      }
    }
    if (!token.empty()) tokens.push_back(token);
  } else {
    for (char c : text) tokens.push_back(std::string(1, c));
  }
  std::vector<int> yield;
  for (const auto& token : tokens) {
    int id = -1;
    for (int t = 0; t < grammar.num_terminals(); ++t)
      if (grammar.terminals[t] == token) id = t;
    if (id < 0) throw pt::DataError("unknown terminal '" + token + "'");
    yield.push_back(id);
  }
  if (yield.empty()) throw pt::DataError("empty yield");
  return yield;
}

pt::Kernel parse_kernel(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  pt::Kernel kernel;
  if (family == "gauss") {
    kernel.family = pt::KernelFamily::kGaussian;
  } else if (family == "bessel") {
    kernel.family = pt::KernelFamily::kBessel;
  } else {
    throw pt::DataError("unknown kernel family: " + family);
  }
  if (colon != std::string::npos) kernel.width = std::stod(text.substr(colon + 1));
  if (!(kernel.width > 0.0)) throw pt::DataError("kernel width must be > 0");
  return kernel;
}

std::string tree_to_json(const pt::Pcfg& grammar, const pt::ParseTree& tree,
                         double log_prob, std::uint64_t seed);

// ---------------------------------------------------------------------------
// hmm
// ---------------------------------------------------------------------------

struct HmmArgs {
  std::string command;
  std::string model_path;
  std::string obs_path;
  std::string out_path;
  std::string states_out;
  std::string trace_out;
  int steps = 100;
  int max_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

void write_posterior_csv(const std::string& path, const pt::PosteriorSequence& post,
                         std::uint64_t seed) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < post.marginals.size(); ++k)
    for (std::size_t a = 0; a < post.marginals[k].size(); ++a)
      rows.push_back({static_cast<double>(k), static_cast<double>(a),
                      post.marginals[k][a]});
  pt::write_csv(path,
                {stamp(seed), "log_likelihood=" + pt::format_double(post.log_likelihood)},
                {"step", "state", "prob"}, rows);
}

int run_hmm(const HmmArgs& args) {
  if (args.command == "sample") {
    const pt::HmmModel model = pt::hmm_from_json(pt::load_text_file(args.model_path));
    const auto sample = pt::hmm_sample(model, args.steps, args.seed);
    pt::write_obs_csv(args.out_path, {stamp(args.seed)}, sample.observations);
    if (!args.states_out.empty()) {
      std::vector<std::vector<double>> rows;
      for (std::size_t k = 0; k < sample.states.size(); ++k)
        rows.push_back({static_cast<double>(k), static_cast<double>(sample.states[k])});
      pt::write_csv(args.states_out, {stamp(args.seed)}, {"step", "state"}, rows);
    }
    return 0;
  }

  const pt::HmmModel model = pt::hmm_from_json(pt::load_text_file(args.model_path));
  const auto obs = pt::read_obs_csv(args.obs_path);
  if (args.command == "filter") {
    write_posterior_csv(args.out_path, pt::forward_filter(model, obs), args.seed);
  } else if (args.command == "smooth") {
    write_posterior_csv(args.out_path, pt::backward_smooth(model, obs), args.seed);
  } else if (args.command == "viterbi") {
    const auto result = pt::viterbi(model, obs);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < result.path.size(); ++k)
      rows.push_back({static_cast<double>(k), static_cast<double>(result.path[k])});
    pt::write_csv(args.out_path,
                  {stamp(args.seed), "log_joint=" + pt::format_double(result.log_joint)},
                  {"step", "state"}, rows);
  } else {  // fit
    const auto result = pt::baum_welch(model, obs, args.max_iters, args.tol);
    pt::save_text_file(args.out_path, pt::hmm_to_json(result.model));
    if (!args.trace_out.empty()) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < result.log_likelihood_trace.size(); ++i)
        rows.push_back({static_cast<double>(i), result.log_likelihood_trace[i]});
      pt::write_csv(args.trace_out, {stamp(args.seed)}, {"iteration", "log_likelihood"},
                    rows);
    }
    if (!result.reset_states.empty())
      std::cerr << "warning: " << result.reset_states.size()
                << " state(s) lost all occupancy and were reset to uniform\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// kalman / track
// ---------------------------------------------------------------------------

int run_kalman(const std::string& model_path, const std::string& obs_path,
               const std::string& out_path) {
  const auto model = pt::linear_gaussian_from_json(pt::load_text_file(model_path));
  const pt::CsvTable table = pt::read_csv(obs_path);
  std::vector<Eigen::VectorXd> obs;
  for (const auto& row : table.rows) {
    Eigen::VectorXd y(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) y[i] = row[i];
    obs.push_back(std::move(y));
  }
  const auto estimates = pt::kalman_filter(model, obs);

  std::vector<std::string> columns = {"step"};
  for (int d = 0; d < model.state_dim(); ++d) columns.push_back("mean_" + std::to_string(d));
  for (int d = 0; d < model.state_dim(); ++d) columns.push_back("var_" + std::to_string(d));
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    std::vector<double> row = {static_cast<double>(k)};
    for (int d = 0; d < model.state_dim(); ++d) row.push_back(estimates[k].mean[d]);
    for (int d = 0; d < model.state_dim(); ++d) row.push_back(estimates[k].cov(d, d));
    rows.push_back(std::move(row));
  }
  pt::write_csv(out_path, {stamp_no_seed()}, columns, rows);
  return 0;
}

struct TrackArgs {
  std::string model_path;
  std::string obs_path;
  std::string out_path;
  std::string kde_out;
  int particles = 5000;
  std::uint64_t seed = 0;
  bool multinomial = false;
  int kde_coord = 0;
  double kde_lo = 0.0;
  double kde_hi = 100.0;
  int kde_bins = 200;
  double kde_bandwidth = 1.0;
};

int run_track(const TrackArgs& args) {
  const auto spec = pt::tracker_from_json(pt::load_text_file(args.model_path));
  pt::StateSpaceModel model;
  if (std::holds_alternative<pt::ClutterTrackerSpec>(spec))
    model = pt::clutter_tracker(std::get<pt::ClutterTrackerSpec>(spec));
  else
    model = pt::hmm_bridge(std::get<pt::HmmModel>(spec));

  const pt::CsvTable table = pt::read_csv(args.obs_path);
  std::vector<Eigen::VectorXd> obs;
  for (const auto& row : table.rows) {
    Eigen::VectorXd y(model.obs_dim);
    if (static_cast<int>(row.size()) < model.obs_dim)
      throw pt::DataError("observation row narrower than the model's obs dim");
    for (int i = 0; i < model.obs_dim; ++i) y[i] = row[i];
    obs.push_back(std::move(y));
  }

  const auto scheme = args.multinomial ? pt::ResampleScheme::kMultinomial
                                       : pt::ResampleScheme::kSystematic;
  const bool want_kde = !args.kde_out.empty();
  const auto run = pt::run_filter(model, obs, args.particles, args.seed, scheme,
                                  want_kde);

  std::vector<std::string> columns = {"step"};
  for (int d = 0; d < model.state_dim; ++d) columns.push_back("mean_" + std::to_string(d));
  columns.push_back("ess");
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < run.means.rows(); ++k) {
    std::vector<double> row = {static_cast<double>(k)};
    for (int d = 0; d < model.state_dim; ++d) row.push_back(run.means(k, d));
    row.push_back(run.ess[k]);
    rows.push_back(std::move(row));
  }
  pt::write_csv(args.out_path, {stamp(args.seed)}, columns, rows);

  if (want_kde) {
    const pt::KdeGrid grid{args.kde_lo, args.kde_hi, args.kde_bins};
    std::vector<std::vector<double>> kde_rows;
    for (std::size_t k = 0; k < run.history.size(); ++k) {
      const auto curve =
          pt::kde_posterior(run.history[k], args.kde_coord, args.kde_bandwidth, grid);
      for (int j = 0; j < grid.count; ++j) {
        const double x = grid.lo + (grid.hi - grid.lo) * j / (grid.count - 1);
        kde_rows.push_back({static_cast<double>(k), x, curve[j]});
      }
    }
    pt::write_csv(args.kde_out, {stamp(args.seed)}, {"step", "x", "density"}, kde_rows);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// ising
// ---------------------------------------------------------------------------

struct IsingArgs {
  std::string field_path;
  std::string out_path;
  std::string snapshot_pattern;
  double t0 = 4.0;
  double rate = 0.95;
  double t_min = 0.05;
  int sweeps = 10;
  double coupling = 1.0;
  double field_strength = 1.0;
  std::uint64_t seed = 0;
};

std::string snapshot_name(const std::string& pattern, int index) {
  // The pattern must contain exactly one integer conversion.
  int conversions = 0;
  for (std::size_t i = 0; i + 1 < pattern.size(); ++i)
    if (pattern[i] == '%' && pattern[i + 1] != '%') ++conversions;
  if (conversions != 1)
    throw pt::DataError("snapshot pattern needs exactly one %d-style slot");
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern.c_str(), index);
  return buf;
}

int run_ising(const IsingArgs& args) {
  const pt::ImageGrid field = pt::read_image(args.field_path);
  const auto schedule = pt::geometric_schedule(args.t0, args.rate, args.t_min);

  // Normalize around the median so dark is negative and light positive, then
  // anneal the two-layer model.
  const double median = field.median();
  double spread = 0.0;
  for (double v : field.samples()) spread = std::max(spread, std::abs(v - median));
  if (spread <= 0.0) throw pt::DataError("degenerate contrast");
  pt::IsingGrid grid;
  grid.width = field.width();
  grid.height = field.height();
  grid.field = pt::ImageGrid(field.width(), field.height());
  for (std::size_t i = 0; i < field.size(); ++i)
    grid.field.samples()[i] = (field.samples()[i] - median) / spread;
  grid.coupling = args.coupling;
  grid.field_strength = args.field_strength;
  grid.temperature = schedule.front();
  grid.spins.assign(field.size(), 1);
  pt::Rng init_rng(args.seed, 0xA11);
  pt::randomize_spins(grid, init_rng);

  const auto result = pt::anneal(grid, schedule, args.sweeps, args.seed);

  if (!args.snapshot_pattern.empty()) {
    for (std::size_t level = 0; level < result.snapshots.size(); ++level) {
      pt::ImageGrid snap(grid.width, grid.height);
      for (std::size_t i = 0; i < snap.size(); ++i)
        snap.samples()[i] = static_cast<double>(result.snapshots[level][i]);
      pt::write_pgm_fixed(snap, -1.0, 1.0,
                          snapshot_name(args.snapshot_pattern, static_cast<int>(level)),
                          stamp(args.seed) + "\nT=" +
                              pt::format_double(schedule[level]));
    }
  }

  pt::ImageGrid mask(grid.width, grid.height);
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask.samples()[i] = static_cast<double>(grid.spins[i]);
  pt::write_pgm_fixed(mask, -1.0, 1.0, args.out_path, stamp(args.seed));
  return 0;
}

// ---------------------------------------------------------------------------
// bp
// ---------------------------------------------------------------------------

int run_bp(const std::string& model_path, const std::string& out_path,
           double damping, int max_iters, double tol, const std::string& method) {
  const auto model = pt::pairwise_from_json(pt::load_text_file(model_path));
  if (method == "bp") {
    const auto result = pt::loopy_bp(model, max_iters, tol, damping);
    pt::save_text_file(out_path, pt::beliefs_to_json(model, result));
    if (!result.converged)
      std::cerr << "warning: message passing oscillating after " << result.iterations
                << " iterations\n";
  } else if (method == "meanfield") {
    const auto result = pt::mean_field(model, max_iters, tol);
    std::ostringstream out;
    out << "{\n  \"converged\": " << (result.converged ? "true" : "false")
        << ",\n  \"free_energy\": " << pt::format_double(result.free_energy)
        << ",\n  \"vertex_beliefs\": [";
    for (std::size_t v = 0; v < result.approx.vertex.size(); ++v) {
      out << (v ? ", [" : "[");
      for (std::size_t x = 0; x < result.approx.vertex[v].size(); ++x)
        out << (x ? ", " : "") << pt::format_double(result.approx.vertex[v][x]);
      out << "]";
    }
    out << "]\n}\n";
    pt::save_text_file(out_path, out.str());
  } else {  // maxprod
    const auto result = pt::max_product(model, max_iters, tol);
    std::ostringstream out;
    out << "{\n  \"exact\": " << (result.exact ? "true" : "false")
        << ",\n  \"config\": [";
    for (std::size_t v = 0; v < result.config.size(); ++v)
      out << (v ? ", " : "") << result.config[v];
    out << "],\n  \"energy\": " << pt::format_double(model.energy(result.config))
        << "\n}\n";
    pt::save_text_file(out_path, out.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// pcfg
// ---------------------------------------------------------------------------

std::string tree_to_json(const pt::Pcfg& grammar, const pt::ParseTree& tree,
                         double log_prob, std::uint64_t seed) {
  std::ostringstream out;
  out << "{\n  \"meta\": \"" << stamp(seed) << "\",\n";
  out << "  \"log_prob\": " << pt::format_double(log_prob) << ",\n";
  out << "  \"yield\": [";
  const auto yield = tree.yield();
  for (std::size_t i = 0; i < yield.size(); ++i)
    out << (i ? ", " : "") << "\"" << grammar.terminals[yield[i]] << "\"";
  out << "],\n  \"nodes\": [\n";
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    const auto& node = tree.nodes[v];
    out << "    {\"label\": \"" << grammar.labels[node.label].name << "\", \"parent\": "
        << node.parent;
    if (node.terminal >= 0)
      out << ", \"terminal\": \"" << grammar.terminals[node.terminal] << "\"";
    out << "}" << (v + 1 < tree.nodes.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

struct PcfgArgs {
  std::string command;
  std::string grammar_path;
  std::string yield_text;
  std::string out_path;
  int unary_cap = 1;
  std::uint64_t seed = 0;
};

int run_pcfg(const PcfgArgs& args) {
  const pt::Pcfg grammar = pt::pcfg_from_json(pt::load_text_file(args.grammar_path));
  if (args.command == "sample") {
    const auto tree = pt::sample_tree(grammar, args.seed);
    const auto score = pt::tree_log_prob(grammar, tree);
    const std::string doc = tree_to_json(grammar, tree, score.log_prob, args.seed);
    if (args.out_path.empty())
      std::cout << doc;
    else
      pt::save_text_file(args.out_path, doc);
    return 0;
  }

  const auto yield = parse_yield(grammar, args.yield_text);
  if (args.command == "inside") {
    const double total = pt::inside(grammar, yield, args.unary_cap);
    std::ostringstream out;
    out << "# " << stamp(args.seed) << "\n"
        << "# unary_cap=" << args.unary_cap << "\n"
        << "inside=" << pt::format_double(total) << "\n";
    if (args.out_path.empty())
      std::cout << out.str();
    else
      pt::save_text_file(args.out_path, out.str());
    return 0;
  }

  // parse
  const auto best = pt::viterbi_parse(grammar, yield, args.unary_cap);
  if (!best.found) {
    std::cerr << "no parse for the given yield\n";
    return 2;
  }
  const std::string doc = tree_to_json(grammar, best.tree, best.log_prob, args.seed);
  if (args.out_path.empty())
    std::cout << doc;
  else
    pt::save_text_file(args.out_path, doc);
  return 0;
}

// ---------------------------------------------------------------------------
// stats / synth / diffuse
// ---------------------------------------------------------------------------

int run_stats(const std::string& command, const std::string& in_path,
              const std::string& out_path, const std::string& diff_axis) {
  const pt::ImageGrid img = pt::read_image(in_path);
  if (command == "kurtosis") {
    std::vector<double> samples;
    if (diff_axis == "x") {
      samples = pt::horizontal_diff(img);
    } else if (diff_axis == "y") {
      for (int y = 0; y + 1 < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
          samples.push_back(img.at(x, y + 1) - img.at(x, y));
    } else {
      samples = img.samples();
    }
    const double value = pt::kurtosis(samples);
    std::ostringstream out;
    out << "# " << stamp_no_seed() << "\nkurtosis=" << pt::format_double(value) << "\n";
    if (out_path.empty())
      std::cout << out.str();
    else
      pt::save_text_file(out_path, out.str());
  } else if (command == "spectrum") {
    const auto fit = pt::power_spectrum_slope(img);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < fit.freq.size(); ++i)
      rows.push_back({fit.freq[i], fit.power[i]});
    pt::write_csv(out_path,
                  {stamp_no_seed(), "lambda=" + pt::format_double(fit.lambda),
                   "residual=" + pt::format_double(fit.residual),
                   std::string("high_residual=") + (fit.high_residual ? "1" : "0")},
                  {"freq", "power"}, rows);
  } else {  // renorm
    write_image_auto(pt::block_renormalize(img), out_path, stamp_no_seed());
  }
  return 0;
}

struct SynthArgs {
  std::string command;
  std::string out_path;
  std::string pgm_path;
  int size = 256;
  std::uint64_t seed = 0;
  // wavelets
  double intensity = 0.02;
  double base_width = 24.0;
  // dead leaves
  double rate = 1.0;
  double r_min = 0.5;
  double r_max = 64.0;
  double exponent = 3.0;
};

int run_synth(const SynthArgs& args) {
  pt::ImageGrid img;
  if (args.command == "wavelets") {
    pt::WaveletProcessSpec spec;
    spec.intensity = args.intensity;
    spec.base_width = args.base_width;
    img = pt::synth_random_wavelets(spec, args.size, args.seed);
  } else {
    pt::DeadLeavesSpec spec;
    spec.leaves_per_area = args.rate;
    spec.r_min = args.r_min;
    spec.r_max = args.r_max;
    spec.radius_exponent = args.exponent;
    const auto result = pt::synth_dead_leaves(spec, args.size, args.seed);
    img = result.image;
    if (result.uncovered > 0)
      std::cerr << "note: " << result.uncovered << " pixels kept the background level\n";
  }
  write_image_auto(img, args.out_path, stamp(args.seed));
  if (!args.pgm_path.empty()) pt::write_pgm(img, args.pgm_path, stamp(args.seed));
  return 0;
}

int run_diffuse(const std::string& in_path, const std::string& out_path,
                const std::string& energy_out, double lambda, int steps, double dt,
                double epsilon) {
  const pt::ImageGrid img = pt::read_image(in_path);
  const auto result = pt::diffuse(img, lambda, steps, dt, epsilon);
  write_image_auto(result.image, out_path, stamp_no_seed());
  if (!energy_out.empty()) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < result.energy_trace.size(); ++i)
      rows.push_back({static_cast<double>(i), result.energy_trace[i]});
    pt::write_csv(energy_out, {stamp_no_seed()}, {"step", "energy"}, rows);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// shape
// ---------------------------------------------------------------------------

struct ShapeArgs {
  int landmarks = 40;
  std::string kernel_text = "gauss:0.4";
  int steps = 10;
  double step_size = 0.03;
  std::vector<double> drift = {1.0, 0.0};
  std::uint64_t seed = 0;
  std::string out_path;
  std::string render_path;
};

int run_shape_walk(const ShapeArgs& args) {
  const pt::Kernel kernel = parse_kernel(args.kernel_text);
  if (args.drift.size() != 2) throw pt::DataError("drift needs two components");
  const pt::ShapeCurve circle = pt::circle_curve(args.landmarks, 1.0);
  const auto walk = pt::shape_random_walk(circle, kernel, args.steps, args.step_size,
                                          {args.drift[0], args.drift[1]}, args.seed);
  if (!walk.completed)
    std::cerr << "warning: curve self-intersected at step " << walk.failed_step
              << "; partial walk written\n";

  std::vector<std::vector<double>> rows;
  for (std::size_t s = 0; s < walk.curves.size(); ++s)
    for (int v = 0; v < walk.curves[s].count(); ++v)
      rows.push_back({static_cast<double>(s), static_cast<double>(v),
                      walk.curves[s].vertices(v, 0), walk.curves[s].vertices(v, 1)});
  pt::write_csv(args.out_path, {stamp(args.seed)}, {"step", "vertex", "x", "y"}, rows);

  if (!args.render_path.empty()) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& curve : walk.curves)
      for (int v = 0; v < curve.count(); ++v) {
        xmin = std::min(xmin, curve.vertices(v, 0));
        xmax = std::max(xmax, curve.vertices(v, 0));
        ymin = std::min(ymin, curve.vertices(v, 1));
        ymax = std::max(ymax, curve.vertices(v, 1));
      }
    const double pad_x = 0.1 * (xmax - xmin) + 0.1;
    const double pad_y = 0.1 * (ymax - ymin) + 0.1;
    pt::Canvas canvas;
    canvas.xmin = xmin - pad_x;
    canvas.xmax = xmax + pad_x;
    canvas.ymin = ymin - pad_y;
    canvas.ymax = ymax + pad_y;
    canvas.width = 640;
    canvas.height = std::max(
        64, static_cast<int>(640 * (canvas.ymax - canvas.ymin) /
                             (canvas.xmax - canvas.xmin)));
    pt::write_pgm(pt::render_curves(walk.curves, canvas), args.render_path,
                  stamp(args.seed));
  }
  return walk.completed ? 0 : 2;
}

// ---------------------------------------------------------------------------
// demo bundles
// ---------------------------------------------------------------------------

int run_demo(const std::string& name, const std::string& out_dir,
             std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto path = [&](const std::string& file) {
    return (fs::path(out_dir) / file).string();
  };

  if (name == "anneal-strip") {
    // Two-region synthetic field with noise, annealed with snapshots per
    // temperature level.
    pt::Rng rng(seed, 0xF1E1D);
    pt::ImageGrid field(64, 64);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x)
        field.at(x, y) = (x < 32 ? 1.0 : -1.0) + 0.6 * rng.normal();
    pt::write_pgm(field, path("field.pgm"), stamp(seed));

    const auto schedule = pt::geometric_schedule(4.0, 0.75, 0.05);
    pt::IsingGrid grid;
    grid.width = 64;
    grid.height = 64;
    grid.field = field;
    const double median = field.median();
    double spread = 0.0;
    for (double v : field.samples()) spread = std::max(spread, std::abs(v - median));
    for (double& v : grid.field.samples()) v = (v - median) / spread;
    grid.temperature = schedule.front();
    grid.spins.assign(field.size(), 1);
    pt::Rng init_rng(seed, 0xA11);
    pt::randomize_spins(grid, init_rng);
    const auto result = pt::anneal(grid, schedule, 10, seed);
    for (std::size_t level = 0; level < result.snapshots.size(); ++level) {
      pt::ImageGrid snap(64, 64);
      for (std::size_t i = 0; i < snap.size(); ++i)
        snap.samples()[i] = static_cast<double>(result.snapshots[level][i]);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "snap_%02d.pgm", static_cast<int>(level));
      pt::write_pgm_fixed(snap, -1.0, 1.0, path(buf),
                          stamp(seed) + "\nT=" + pt::format_double(schedule[level]));
    }
    pt::ImageGrid mask(64, 64);
    for (std::size_t i = 0; i < mask.size(); ++i)
      mask.samples()[i] = static_cast<double>(grid.spins[i]);
    pt::write_pgm_fixed(mask, -1.0, 1.0, path("mask.pgm"), stamp(seed));
    return 0;
  }

  if (name == "shape-walk") {
    ShapeArgs args;
    args.seed = seed;
    args.out_path = path("walk.csv");
    args.render_path = path("walk.pgm");
    return run_shape_walk(args);
  }

  if (name == "deadleaves-gallery") {
    pt::DeadLeavesSpec spec;
    for (int i = 0; i < 4; ++i) {
      const auto img = pt::synth_dead_leaves(spec, 256, seed + i);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "leaves_%d.pgm", i);
      pt::write_pgm(img.image, path(buf), stamp(seed + i));
      const auto fit = pt::power_spectrum_slope(img.image);
      std::vector<std::vector<double>> rows;
      for (std::size_t j = 0; j < fit.freq.size(); ++j)
        rows.push_back({fit.freq[j], fit.power[j]});
      std::snprintf(buf, sizeof(buf), "spectrum_%d.csv", i);
      pt::write_csv(path(buf),
                    {stamp(seed + i), "lambda=" + pt::format_double(fit.lambda)},
                    {"freq", "power"}, rows);
    }
    return 0;
  }

  if (name == "tracker") {
    pt::ClutterTrackerSpec spec;
    spec.clutter_prob = 0.15;
    const int steps = 40;
    const auto sim = pt::simulate_clutter_track(spec, steps, seed);
    std::vector<std::vector<double>> obs_rows, truth_rows;
    for (int k = 0; k < steps; ++k) {
      obs_rows.push_back({sim.observations[k][0], sim.observations[k][1]});
      truth_rows.push_back({static_cast<double>(k), sim.truth(k, 0), sim.truth(k, 1),
                            sim.truth(k, 2), sim.truth(k, 3)});
    }
    pt::write_csv(path("obs.csv"), {stamp(seed)}, {"x", "y"}, obs_rows);
    pt::write_csv(path("truth.csv"), {stamp(seed)}, {"step", "x", "y", "vx", "vy"},
                  truth_rows);
    pt::save_text_file(path("tracker.json"), pt::tracker_to_json(spec));

    TrackArgs track;
    track.model_path = path("tracker.json");
    track.obs_path = path("obs.csv");
    track.out_path = path("track.csv");
    track.kde_out = path("kde.csv");
    track.particles = 5000;
    track.seed = seed + 1;
    track.kde_coord = 0;
    track.kde_lo = 0.0;
    track.kde_hi = spec.arena_size;
    track.kde_bins = 200;
    track.kde_bandwidth = 1.0;
    return run_track(track);
  }

  throw pt::DataError("unknown demo: " + name);
}

}  // namespace

// Expands `--config file.json` (a flat object of flag -> value) into
// trailing command-line options; explicit flags win because CLI11 takes the
// first occurrence for non-repeatable options.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args;
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config_path = argv[++i];
    } else {
      args.push_back(arg);
    }
  }
  if (config_path.empty()) return args;

  const auto doc = nlohmann::json::parse(pt::load_text_file(config_path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw pt::DataError("config file must hold one JSON object: " + config_path);
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end())
      continue;  // explicit flags override config values
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else {
      args.push_back(flag);
      args.push_back(value.dump());
    }
  }
  return args;
}

int main(int argc, char** argv) {
  std::ostringstream cmd;
  for (int i = 1; i < argc; ++i) cmd << (i > 1 ? " " : "") << argv[i];
  g_command_line = cmd.str();

  CLI::App app{"pattern-model toolkit"};
  app.set_version_flag("--version", std::string("pt ") + pt::kVersion);
  app.require_subcommand(0, 1);

  // hmm
  HmmArgs hmm_args;
  auto* hmm = app.add_subcommand("hmm", "discrete hidden Markov models");
  hmm->require_subcommand(1);
  for (const char* sub : {"filter", "smooth", "viterbi", "sample", "fit"}) {
    auto* c = hmm->add_subcommand(sub);
    c->add_option("--model", hmm_args.model_path)->required();
    if (std::string(sub) == "sample") {
      c->add_option("--steps", hmm_args.steps);
      c->add_option("--seed", hmm_args.seed)->required();
      c->add_option("--states-out", hmm_args.states_out);
    } else {
      c->add_option("--obs", hmm_args.obs_path)->required();
    }
    if (std::string(sub) == "fit") {
      c->add_option("--max-iters", hmm_args.max_iters);
      c->add_option("--tol", hmm_args.tol);
      c->add_option("--trace", hmm_args.trace_out);
    }
    c->add_option("--out", hmm_args.out_path)->required();
    c->callback([&hmm_args, sub]() { hmm_args.command = sub; });
  }

  // kalman
  std::string kalman_model, kalman_obs, kalman_out;
  auto* kalman = app.add_subcommand("kalman", "linear-Gaussian filtering");
  kalman->add_option("--model", kalman_model)->required();
  kalman->add_option("--obs", kalman_obs)->required();
  kalman->add_option("--out", kalman_out)->required();

  // track
  TrackArgs track_args;
  auto* track = app.add_subcommand("track", "bootstrap particle filtering");
  track->add_option("--model", track_args.model_path)->required();
  track->add_option("--obs", track_args.obs_path)->required();
  track->add_option("--out", track_args.out_path)->required();
  track->add_option("--particles", track_args.particles);
  track->add_option("--seed", track_args.seed)->required();
  track->add_flag("--multinomial", track_args.multinomial,
                  "multinomial resampling instead of systematic");
  track->add_option("--kde-out", track_args.kde_out);
  track->add_option("--kde-coord", track_args.kde_coord);
  track->add_option("--kde-min", track_args.kde_lo);
  track->add_option("--kde-max", track_args.kde_hi);
  track->add_option("--kde-bins", track_args.kde_bins);
  track->add_option("--kde-bandwidth", track_args.kde_bandwidth);

  // ising
  IsingArgs ising_args;
  auto* ising = app.add_subcommand("ising", "two-layer Ising field");
  auto* ising_anneal = ising->add_subcommand("anneal", "annealed segmentation");
  ising_anneal->add_option("--field", ising_args.field_path)->required();
  ising_anneal->add_option("--out", ising_args.out_path)->required();
  ising_anneal->add_option("--snapshots", ising_args.snapshot_pattern);
  ising_anneal->add_option("--t0", ising_args.t0);
  ising_anneal->add_option("--rate", ising_args.rate);
  ising_anneal->add_option("--tmin", ising_args.t_min);
  ising_anneal->add_option("--sweeps", ising_args.sweeps);
  ising_anneal->add_option("--coupling", ising_args.coupling);
  ising_anneal->add_option("--field-strength", ising_args.field_strength);
  ising_anneal->add_option("--seed", ising_args.seed)->required();

  // bp
  std::string bp_model, bp_out, bp_method = "bp";
  double bp_damping = 0.5, bp_tol = 1e-9;
  int bp_iters = 1000;
  auto* bp = app.add_subcommand("bp", "pairwise model inference");
  bp->add_option("--model", bp_model)->required();
  bp->add_option("--out", bp_out)->required();
  bp->add_option("--damping", bp_damping);
  bp->add_option("--max-iters", bp_iters);
  bp->add_option("--tol", bp_tol);
  bp->add_option("--method", bp_method)
      ->check(CLI::IsMember({"bp", "meanfield", "maxprod"}));

  // pcfg
  PcfgArgs pcfg_args;
  auto* pcfg = app.add_subcommand("pcfg", "probabilistic context-free grammars");
  pcfg->require_subcommand(1);
  for (const char* sub : {"sample", "inside", "parse"}) {
    auto* c = pcfg->add_subcommand(sub);
    c->add_option("--grammar", pcfg_args.grammar_path)->required();
    if (std::string(sub) != "sample")
      c->add_option("--yield", pcfg_args.yield_text)->required();
    else
      c->add_option("--seed", pcfg_args.seed)->required();
    c->add_option("--unary-cap", pcfg_args.unary_cap);
    c->add_option("--out", pcfg_args.out_path);
    c->callback([&pcfg_args, sub]() { pcfg_args.command = sub; });
  }

  // stats
  std::string stats_cmd, stats_in, stats_out, stats_diff = "x";
  auto* stats = app.add_subcommand("stats", "image statistics");
  stats->require_subcommand(1);
  for (const char* sub : {"kurtosis", "spectrum", "renorm"}) {
    auto* c = stats->add_subcommand(sub);
    c->add_option("--in", stats_in)->required();
    if (std::string(sub) == "kurtosis") {
      c->add_option("--diff", stats_diff)->check(CLI::IsMember({"x", "y", "none"}));
      c->add_option("--out", stats_out);
    } else {
      c->add_option("--out", stats_out)->required();
    }
    c->callback([&stats_cmd, sub]() { stats_cmd = sub; });
  }

  // synth
  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generative image models");
  synth->require_subcommand(1);
  for (const char* sub : {"wavelets", "deadleaves"}) {
    auto* c = synth->add_subcommand(sub);
    c->add_option("--size", synth_args.size);
    c->add_option("--seed", synth_args.seed)->required();
    c->add_option("--out", synth_args.out_path)->required();
    c->add_option("--pgm", synth_args.pgm_path);
    if (std::string(sub) == "wavelets") {
      c->add_option("--intensity", synth_args.intensity);
      c->add_option("--base-width", synth_args.base_width);
    } else {
      c->add_option("--rate", synth_args.rate);
      c->add_option("--rmin", synth_args.r_min);
      c->add_option("--rmax", synth_args.r_max);
      c->add_option("--exponent", synth_args.exponent);
    }
    c->callback([&synth_args, sub]() { synth_args.command = sub; });
  }

  // diffuse
  std::string diffuse_in, diffuse_out, diffuse_energy;
  double diffuse_lambda = 0.1, diffuse_dt = 0.02, diffuse_eps = 0.1;
  int diffuse_steps = 100;
  auto* diffuse = app.add_subcommand("diffuse", "nonlinear diffusion restoration");
  diffuse->add_option("--in", diffuse_in)->required();
  diffuse->add_option("--out", diffuse_out)->required();
  diffuse->add_option("--lambda", diffuse_lambda);
  diffuse->add_option("--steps", diffuse_steps);
  diffuse->add_option("--dt", diffuse_dt);
  diffuse->add_option("--epsilon", diffuse_eps);
  diffuse->add_option("--energy-out", diffuse_energy);

  // shape
  ShapeArgs shape_args;
  auto* shape = app.add_subcommand("shape", "landmark shape space");
  auto* walk = shape->add_subcommand("walk", "random walk on closed curves");
  walk->add_option("--n", shape_args.landmarks);
  walk->add_option("--kernel", shape_args.kernel_text);
  walk->add_option("--steps", shape_args.steps);
  walk->add_option("--step-size", shape_args.step_size);
  walk->add_option("--drift", shape_args.drift)->expected(2)->delimiter(',');
  walk->add_option("--seed", shape_args.seed)->required();
  walk->add_option("--out", shape_args.out_path)->required();
  walk->add_option("--render", shape_args.render_path);

  // demo
  std::string demo_name, demo_dir;
  std::uint64_t demo_seed = 0;
  auto* demo = app.add_subcommand("demo", "reproducible artifact bundles");
  demo->add_option("name", demo_name)
      ->required()
      ->check(CLI::IsMember({"anneal-strip", "shape-walk", "deadleaves-gallery",
                             "tracker"}));
  demo->add_option("--out-dir", demo_dir)->required();
  demo->add_option("--seed", demo_seed)->required();

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems exit 1, help exits 0
  } catch (const pt::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }

  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 1;
  }

  try {
    if (hmm->parsed()) return run_hmm(hmm_args);
    if (kalman->parsed()) return run_kalman(kalman_model, kalman_obs, kalman_out);
    if (track->parsed()) return run_track(track_args);
    if (ising->parsed()) return run_ising(ising_args);
    if (bp->parsed()) return run_bp(bp_model, bp_out, bp_damping, bp_iters, bp_tol, bp_method);
    if (pcfg->parsed()) return run_pcfg(pcfg_args);
    if (stats->parsed()) return run_stats(stats_cmd, stats_in, stats_out, stats_diff);
    if (synth->parsed()) return run_synth(synth_args);
    if (diffuse->parsed())
      return run_diffuse(diffuse_in, diffuse_out, diffuse_energy, diffuse_lambda,
                         diffuse_steps, diffuse_dt, diffuse_eps);
    if (shape->parsed()) return run_shape_walk(shape_args);
    if (demo->parsed()) return run_demo(demo_name, demo_dir, demo_seed);
  } catch (const pt::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 2;
  } catch (const pt::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
