// Experiment driver: 1D mixture study, theory checks, masks, 2D/3D fitting,
// rendering and paired GES-vs-Gaussian benchmarks.
//
// Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ges/format.hpp"
#include "ges/freqloss.hpp"
#include "ges/io.hpp"
#include "ges/sim1d.hpp"
#include "ges/synth.hpp"
#include "ges/theory.hpp"
#include "ges/train.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace ges;

namespace {

constexpr const char* kVersion = "1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::optional<std::uint64_t> seed_flag;
  std::string config_path;
  std::string out_dir = "out";
  int threads = 1;
  std::vector<std::string> overrides;  // key=value
  std::vector<std::string> argv;

  std::uint64_t seed() const {
    if (seed_flag) return *seed_flag;
    if (const char* env = std::getenv("GES_SEED")) {
      std::uint64_t v = 0;
      const std::string_view s(env);
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("GES_SEED is not an unsigned integer");
      return v;
    }
    return 0;
  }

  fs::path out() const {
    fs::create_directories(out_dir);
    return out_dir;
  }
};

// Config file first, then --set overrides, then the command's own flags.
train::TrainConfig load_config(const Global& g) {
  train::TrainConfig cfg;
  if (!g.config_path.empty()) cfg = train::parse_config(io::read_text_file(g.config_path));
  for (const std::string& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    train::set_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.seed = g.seed();
  cfg.threads = g.threads;
  return cfg;
}

json config_json(const train::TrainConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : train::config_entries(cfg)) j[k] = v;
  return j;
}

class Manifest {
 public:
  Manifest(const Global& g, std::string command) : g_(g) {
    j_["tool"] = "ges";
    j_["version"] = kVersion;
    j_["command"] = std::move(command);
    j_["seed"] = g.seed();
    j_["threads"] = g.threads;
    j_["args"] = g.argv;
    j_["outputs"] = json::array();
  }

  json& operator[](const char* key) { return j_[key]; }

  void text(const fs::path& name, std::string_view content) {
    io::write_text_file(g_.out() / name, content);
    j_["outputs"].push_back(name.string());
  }
  void ppm(const fs::path& name, const Image& img) {
    io::save_ppm(g_.out() / name, img);
    j_["outputs"].push_back(name.string());
  }

  void write() { io::write_text_file(g_.out() / "manifest.json", j_.dump(2) + "\n"); }

 private:
  const Global& g_;
  json j_;
};

std::string omega_tag(double w) {
  std::string s = format_double(w, 6);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

// ---------------------------------------------------------------- sim1d

struct Sim1dOpts {
  int runs = 20;
  int epochs = 2000;
  double lr = 0.01;
  std::vector<std::string> signals;
  std::vector<std::string> mixtures;
  std::vector<int> ns;
  std::string weights = "both";
  std::size_t samples = 256;
  bool per_component_beta = false;
  bool svg = false;
};

int cmd_sim1d(const Global& g, const Sim1dOpts& o) {
  sim1d::BenchmarkConfig bc;
  bc.runs = o.runs;
  bc.fit.epochs = o.epochs;
  bc.fit.adam.lr = o.lr;
  bc.seed = g.seed();
  bc.threads = g.threads;
  bc.samples = o.samples;
  bc.per_component_beta = o.per_component_beta;
  try {
    if (!o.signals.empty()) {
      bc.signals.clear();
      for (const auto& s : o.signals) bc.signals.push_back(sim1d::signal_kind_from_string(s));
    }
    if (!o.mixtures.empty()) {
      bc.mixtures.clear();
      for (const auto& s : o.mixtures) bc.mixtures.push_back(sim1d::mixture_kind_from_string(s));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!o.ns.empty()) bc.ns = o.ns;
  if (o.weights == "positive") bc.weight_modes = {true};
  else if (o.weights == "signed") bc.weight_modes = {false};
  if (bc.runs <= 0 || bc.fit.epochs <= 0) throw UsageError("--runs and --epochs must be positive");

  const auto rows = sim1d::run_benchmark(bc);
  Manifest m(g, "sim1d");
  m["benchmark"] = {{"runs", bc.runs}, {"epochs", bc.fit.epochs}, {"lr", bc.fit.adam.lr}, {"samples", bc.samples},
                    {"per_component_beta", bc.per_component_beta}, {"ns", bc.ns}, {"weights", o.weights}};
  std::ostringstream summary, runs;
  sim1d::write_benchmark_csv(summary, rows);
  sim1d::write_runs_csv(runs, rows);
  m.text("sim1d_summary.csv", summary.str());
  m.text("sim1d_runs.csv", runs.str());

  if (o.svg) {
    for (sim1d::SignalKind sk : bc.signals) {
      for (bool pos : bc.weight_modes) {
        std::vector<tools::Series> series;
        for (sim1d::MixtureKind mk : bc.mixtures) {
          tools::Series s{std::string(sim1d::to_string(mk)), {}, {}};
          for (const auto& r : rows) {
            if (r.signal == sk && r.mixture == mk && r.positive_weights == pos) {
              s.x.push_back(r.n);
              s.y.push_back(r.median_loss);
            }
          }
          series.push_back(std::move(s));
        }
        const std::string tag = std::string(sim1d::to_string(sk)) + (pos ? "_positive" : "_signed");
        m.text("sim1d_" + tag + ".svg", tools::line_chart(tag + ": median final MSE", "components N", "MSE", series, true));
      }
    }
  }
  m.write();

  std::cout << "signal,mixture,n,weights,stability_pct,median_loss\n";
  for (const auto& r : rows) {
    std::cout << sim1d::to_string(r.signal) << ',' << sim1d::to_string(r.mixture) << ',' << r.n << ','
              << (r.positive_weights ? "positive" : "signed") << ',' << format_double(r.stability_pct, 6) << ','
              << format_double(r.median_loss, 6) << '\n';
  }
  return 0;
}

// ------------------------------------------------------------- theorem1

int cmd_theorem1(const Global& g, double amplitude, const std::vector<double>& widths,
                 const std::vector<double>& alphas) {
  const auto grid = theory::default_beta_grid();
  std::vector<std::vector<std::string>> rows;
  bool all_verified = true;
  for (double L : widths) {
    for (double a : alphas) {
      const theory::SquareApproxProblem p{amplitude, L, a};
      p.validate();
      const auto r = theory::verify_theorem1(p, grid);
      all_verified = all_verified && r.verified;
      const std::string rule = r.sign_rule_holds ? (*r.sign_rule_holds ? "yes" : "no") : "n/a";
      rows.push_back({format_double(amplitude), format_double(L), format_double(a), format_double(r.beta_star),
                      format_double(r.e_gaussian), format_double(r.e_gef), format_double(r.delta),
                      r.verified ? "yes" : "no", theory::to_string(r.prediction), rule, r.message});
      std::cout << "A=" << format_double(amplitude, 6) << " L=" << format_double(L, 6) << " alpha=" << format_double(a, 6)
                << ": beta*=" << format_double(r.beta_star, 6) << " E_gauss=" << format_double(r.e_gaussian, 6)
                << " E_gef=" << format_double(r.e_gef, 6) << " verified=" << (r.verified ? "yes" : "no")
                << " sign_rule=" << rule << "\n";
    }
  }
  Manifest m(g, "theorem1");
  m["amplitude"] = amplitude;
  m["widths"] = widths;
  m["alphas"] = alphas;
  std::ostringstream csv;
  io::write_csv(csv,
                {"amplitude", "width", "alpha", "beta_star", "e_gaussian", "e_gef", "delta", "verified",
                 "sign_prediction", "sign_rule_holds", "message"},
                rows);
  m.text("theorem1.csv", csv.str());
  m["all_verified"] = all_verified;
  m.write();
  return 0;
}

// ------------------------------------------------------------------ eta

int cmd_eta(const Global& g, const std::vector<double>& betas, std::size_t samples) {
  const std::uint64_t seed = g.seed();
  const auto bounds = theory::eta_bounds();
  std::cout << "bounds: low " << format_double(bounds.low, 12) << " high " << format_double(bounds.high, 12) << "\n";
  std::vector<std::vector<std::string>> rows;
  for (double b : betas) {
    const auto e = theory::eta_monte_carlo(b, samples, seed);
    rows.push_back({format_double(b), format_double(e.eta), format_double(e.std_error), std::to_string(e.samples),
                    format_double(e.circle_radius), format_double(bounds.low), format_double(bounds.high)});
    std::cout << "beta " << format_double(b, 6) << ": eta " << format_double(e.eta, 6) << " +- "
              << format_double(e.std_error, 3) << "\n";
  }
  Manifest m(g, "eta");
  m["samples"] = samples;
  std::ostringstream csv;
  io::write_csv(csv, {"beta", "eta", "std_error", "samples", "circle_radius", "bound_low", "bound_high"}, rows);
  m.text("eta.csv", csv.str());
  m.write();
  return 0;
}

// ----------------------------------------------------------------- mask

int cmd_mask(const Global& g, const std::string& image_path, const std::vector<double>& omegas) {
  const Image target = io::load_ppm(image_path);
  const train::TrainConfig cfg = load_config(g);
  const auto mcfg = cfg.mask_config();
  Manifest m(g, "mask");
  m["image"] = image_path;
  m["omegas"] = omegas;
  m["config"] = config_json(cfg);
  for (double w : omegas) {
    if (!(w >= 0.0 && w <= 1.0)) throw UsageError("omega values must be in [0, 1]");
    const Image mask = freq::dog_mask(target, w, mcfg);
    double on = 0.0;
    for (double v : mask.data) on += v;
    m.ppm("mask_w" + omega_tag(w) + ".ppm", mask);
    m.ppm("response_w" + omega_tag(w) + ".ppm", freq::dog_response(target, w, mcfg));
    std::cout << "omega " << format_double(w, 6) << ": mask covers " << format_double(100.0 * on / mask.size(), 4)
              << "% of pixels\n";
  }
  m.write();
  return 0;
}

// ---------------------------------------------------------------- fit2d

struct FitOpts {
  std::string input;
  std::string init;
  int splats = 100;
  std::int64_t iterations = 0;  // 0 keeps the config value
  bool baseline = false;
  std::optional<double> rho;
  std::optional<double> lambda_omega;
};

train::TrainConfig fit_config(const Global& g, const FitOpts& o) {
  train::TrainConfig cfg = load_config(g);
  if (o.iterations > 0) cfg.iterations = o.iterations;
  if (o.rho) cfg.rho = *o.rho;
  if (o.lambda_omega) cfg.lambda_omega = *o.lambda_omega;
  if (o.baseline) cfg = cfg.gaussian_baseline();
  cfg.validate();
  return cfg;
}

json stats_json(const train::TrainStats& s) {
  return {{"peak_splats", s.peak_splats},       {"clones", s.clones},
          {"splits", s.splits},                 {"opacity_pruned", s.opacity_pruned},
          {"shape_pruned", s.shape_pruned},     {"opacity_resets", s.opacity_resets},
          {"shape_resets", s.shape_resets},     {"densify_events", s.densify_events}};
}

int cmd_fit2d(const Global& g, const FitOpts& o) {
  const Image target = io::load_ppm(o.input);
  if (target.channels != 3) throw std::runtime_error("fit2d: expected an RGB image");
  const train::TrainConfig cfg = fit_config(g, o);
  Scene2 init = o.init.empty() ? synth::random_scene_2d(o.splats, target.width, target.height, cfg.seed)
                               : io::parse_scene_2d(io::read_text_file(o.init));
  const auto r = train::train_2d(std::move(init), target, cfg);
  const Image out = render(r.scene, cfg.render_config(target.width, target.height));
  Manifest m(g, "fit2d");
  m["image"] = o.input;
  m["config"] = config_json(cfg);
  m.text("scene.txt", io::serialize_scene(r.scene));
  m.ppm("render.ppm", out);
  m.text("metrics.csv", io::metrics_csv(r.history));
  m["stats"] = stats_json(r.stats);
  m["final"] = {{"psnr", format_double(psnr(out, target))}, {"splats", r.scene.size()}};
  m.write();
  std::cout << "final psnr " << format_double(psnr(out, target), 6) << " dB, " << r.scene.size() << " splats (peak "
            << r.stats.peak_splats << ", shape-pruned " << r.stats.shape_pruned << ")\n";
  return 0;
}

// ---------------------------------------------------------------- fit3d

int cmd_fit3d(const Global& g, const FitOpts& o) {
  const io::Dataset ds = io::load_dataset(o.input);
  const train::TrainConfig cfg = fit_config(g, o);
  Scene3 init;
  if (!o.init.empty()) {
    init = io::parse_scene_3d(io::read_text_file(o.init));
  } else if (fs::exists(fs::path(o.input) / "init.scene")) {
    init = io::parse_scene_3d(io::read_text_file(fs::path(o.input) / "init.scene"));
  } else {
    init = synth::random_scene_3d(o.splats, cfg.seed);
  }
  const auto r = train::train_3d(std::move(init), ds.train, cfg);
  Manifest m(g, "fit3d");
  m["dataset"] = o.input;
  m["config"] = config_json(cfg);
  m.text("scene.txt", io::serialize_scene(r.scene));
  m.text("metrics.csv", io::metrics_csv(r.history));
  std::vector<std::vector<std::string>> rows;
  auto eval = [&](const std::vector<train::View>& views, const std::vector<std::string>& names, const char* split) {
    for (std::size_t i = 0; i < views.size(); ++i) {
      const Image& img = views[i].image;
      const Image out = render(r.scene, views[i].camera, cfg.render_config(img.width, img.height));
      m.ppm("render_" + names[i] + ".ppm", out);
      rows.push_back({names[i], split, format_double(psnr(out, img))});
      std::cout << split << ' ' << names[i] << ": psnr " << format_double(psnr(out, img), 6) << " dB\n";
    }
  };
  eval(ds.train, ds.train_names, "train");
  eval(ds.test, ds.test_names, "test");
  std::ostringstream csv;
  io::write_csv(csv, {"view", "split", "psnr"}, rows);
  m.text("views.csv", csv.str());
  m["stats"] = stats_json(r.stats);
  m["final"] = {{"splats", r.scene.size()}};
  m.write();
  std::cout << r.scene.size() << " splats (peak " << r.stats.peak_splats << ")\n";
  return 0;
}

// --------------------------------------------------------------- render

int cmd_render(const Global& g, const std::string& scene_path, const std::string& camera_path, int width,
               int height) {
  const io::AnyScene scene = io::parse_scene(io::read_text_file(scene_path));
  const train::TrainConfig cfg = load_config(g);
  Manifest m(g, "render");
  m["scene"] = scene_path;
  m["config"] = config_json(cfg);
  RenderDiagnostics diag;
  Image img;
  if (const auto* s2 = std::get_if<Scene2>(&scene)) {
    if (!camera_path.empty()) throw UsageError("--camera only applies to 3d scenes");
    if (width <= 0 || height <= 0) throw UsageError("2d scenes need --width and --height");
    img = render(*s2, cfg.render_config(width, height), &diag);
  } else {
    if (camera_path.empty()) throw UsageError("3d scenes need --camera");
    const Camera cam = io::parse_camera(io::read_text_file(camera_path));
    if (width <= 0) width = static_cast<int>(std::lround(2 * cam.cx));
    if (height <= 0) height = static_cast<int>(std::lround(2 * cam.cy));
    if (width <= 0 || height <= 0) throw UsageError("cannot infer the image size; pass --width and --height");
    m["camera"] = camera_path;
    img = render(std::get<Scene3>(scene), cam, cfg.render_config(width, height), &diag);
  }
  m.ppm("render.ppm", img);
  m["skipped_singular"] = diag.skipped_singular;
  m.write();
  if (diag.skipped_singular > 0) std::cerr << "warning: skipped " << diag.skipped_singular << " singular splats\n";
  return 0;
}

// ---------------------------------------------------------------- bench

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_bench(const Global& g, const FitOpts& o, int seeds) {
  if (seeds <= 0) throw UsageError("--seeds must be positive");
  const Image target = io::load_ppm(o.input);
  FitOpts ges_opts = o;
  ges_opts.baseline = false;
  const train::TrainConfig base_cfg = fit_config(g, ges_opts);
  std::vector<std::vector<std::string>> rows;
  std::vector<double> gaps, reductions;
  std::cout << "seed  ges_psnr  gs_psnr  ges_n  gs_n  shape_pruned\n";
  for (int k = 0; k < seeds; ++k) {
    train::TrainConfig ges_cfg = base_cfg;
    ges_cfg.seed = base_cfg.seed + static_cast<std::uint64_t>(k);
    const train::TrainConfig gs_cfg = ges_cfg.gaussian_baseline();
    const Scene2 init = synth::random_scene_2d(o.splats, target.width, target.height, ges_cfg.seed);
    const auto a = train::train_2d(init, target, ges_cfg);
    const auto b = train::train_2d(init, target, gs_cfg);
    const double pa = psnr(render(a.scene, ges_cfg.render_config(target.width, target.height)), target);
    const double pb = psnr(render(b.scene, gs_cfg.render_config(target.width, target.height)), target);
    const double na = static_cast<double>(a.scene.size()), nb = static_cast<double>(b.scene.size());
    gaps.push_back(pa - pb);
    reductions.push_back(1.0 - na / nb);
    rows.push_back({std::to_string(ges_cfg.seed), format_double(pa), format_double(pb), std::to_string(a.scene.size()),
                    std::to_string(b.scene.size()), std::to_string(a.stats.peak_splats),
                    std::to_string(b.stats.peak_splats), std::to_string(a.stats.shape_pruned),
                    std::to_string(a.stats.shape_resets)});
    std::cout << ges_cfg.seed << "  " << format_double(pa, 5) << "  " << format_double(pb, 5) << "  " << a.scene.size()
              << "  " << b.scene.size() << "  " << a.stats.shape_pruned << "\n";
  }
  const double gap = median(gaps), red = median(reductions);
  std::cout << "median psnr gap (ges - gaussian): " << format_double(gap, 4) << " dB\n"
            << "median component reduction: " << format_double(100.0 * red, 4) << "%\n";
  Manifest m(g, "bench");
  m["image"] = o.input;
  m["seeds"] = seeds;
  m["config"] = config_json(base_cfg);
  std::ostringstream csv;
  io::write_csv(csv,
                {"seed", "ges_psnr", "gaussian_psnr", "ges_splats", "gaussian_splats", "ges_peak", "gaussian_peak",
                 "ges_shape_pruned", "ges_shape_resets"},
                rows);
  m.text("bench.csv", csv.str());
  m["median_psnr_gap_db"] = format_double(gap);
  m["median_component_reduction"] = format_double(red);
  m.write();
  return 0;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const Global& g, const std::string& kind, int size, int splats, int cameras, double perturb) {
  Manifest m(g, "synth");
  m["kind"] = kind;
  m["size"] = size;
  if (kind == "checker") {
    m.ppm("target.ppm", synth::checker_disk_image(size));
  } else if (kind == "square") {
    m.ppm("target.ppm", synth::square_image(size));
  } else if (kind == "3d") {
    if (cameras < 1) throw UsageError("--cameras must be positive");
    const Scene3 gt = synth::random_scene_3d(splats, g.seed());
    // One extra camera on the ring is held out for evaluation.
    const auto cams = synth::ring_cameras(cameras + 1, size, 4.0, 1.0);
    const auto views = synth::render_views(gt, cams, size, shape::ShapeModifier{});
    std::vector<std::string> names;
    for (int i = 0; i < cameras; ++i) {
      std::ostringstream n;
      n << "view_" << std::setw(3) << std::setfill('0') << i;
      names.push_back(n.str());
    }
    names.push_back("test_000");
    const fs::path dir = g.out() / "dataset";
    io::save_dataset(dir, views, names);
    io::write_text_file(dir / "init.scene", io::serialize_scene(synth::perturb(gt, perturb, g.seed() + 1)));
    m.text("gt.scene", io::serialize_scene(gt));
    m["splats"] = splats;
    m["cameras"] = cameras;
    m["perturb"] = perturb;
    m["dataset"] = "dataset";
  } else {
    throw UsageError("synth kind must be checker, square or 3d");
  }
  m.write();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized exponential splatting experiments"};
  app.require_subcommand(1);
  Global g;
  for (int i = 1; i < argc; ++i) g.argv.emplace_back(argv[i]);
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (falls back to GES_SEED, then 0)");
  app.add_option("--config", g.config_path, "Training config file (key = value lines)")->check(CLI::ExistingFile);
  app.add_option("--out-dir", g.out_dir, "Directory for every output file");
  app.add_option("--threads", g.threads, "Worker thread cap")->check(CLI::PositiveNumber);
  app.add_option("--set", g.overrides, "Config override key=value (repeatable)");

  Sim1dOpts sim;
  auto* c_sim = app.add_subcommand("sim1d", "1D mixture-fitting benchmark");
  c_sim->add_option("--runs", sim.runs, "Runs per configuration");
  c_sim->add_option("--epochs", sim.epochs, "Adam epochs per run");
  c_sim->add_option("--lr", sim.lr, "Adam learning rate");
  c_sim->add_option("--signals", sim.signals, "Signal kinds")->delimiter(',');
  c_sim->add_option("--mixtures", sim.mixtures, "Mixture kinds")->delimiter(',');
  c_sim->add_option("--ns", sim.ns, "Component counts")->delimiter(',');
  c_sim->add_option("--weights", sim.weights, "positive, signed or both")
      ->check(CLI::IsMember({"positive", "signed", "both"}));
  c_sim->add_option("--samples", sim.samples, "Grid samples per signal");
  c_sim->add_flag("--per-component-beta", sim.per_component_beta, "One shape per GEF component");
  c_sim->add_flag("--svg", sim.svg, "Also write SVG loss plots");

  double amplitude = 1.0;
  std::vector<double> widths{1.0}, alphas{0.2, 0.5, 0.8};
  auto* c_thm = app.add_subcommand("theorem1", "Square-pulse approximation check");
  c_thm->add_option("--amplitude", amplitude, "Pulse height");
  c_thm->add_option("--widths", widths, "Pulse widths")->delimiter(',');
  c_thm->add_option("--alphas", alphas, "Kernel scales")->delimiter(',');

  std::vector<double> betas{2.0, 2.5, 3.0, 4.0, 6.0, 8.0};
  std::size_t eta_samples = 1000000;
  auto* c_eta = app.add_subcommand("eta", "Boundary-error bound constants and Monte-Carlo estimates");
  c_eta->add_option("--betas", betas, "Shapes (>= 2)")->delimiter(',');
  c_eta->add_option("--samples", eta_samples, "Monte-Carlo samples");

  std::string mask_image;
  std::vector<double> omegas{0.0, 0.25, 0.5, 0.75, 1.0};
  auto* c_mask = app.add_subcommand("mask", "Frequency masks of an image");
  c_mask->add_option("image", mask_image, "Input PPM")->required()->check(CLI::ExistingFile);
  c_mask->add_option("--omegas", omegas, "Schedule positions in [0, 1]")->delimiter(',');

  FitOpts fit2, fit3, bench;
  auto add_fit = [](CLI::App* c, FitOpts& o, const char* input_help) {
    c->add_option("input", o.input, input_help)->required()->check(CLI::ExistingPath);
    c->add_option("--splats", o.splats, "Random initial splats when no --init is given");
    c->add_option("--iterations", o.iterations, "Override the configured iteration count");
    c->add_option("--rho", o.rho, "Override the shape strength");
    c->add_option("--lambda-omega", o.lambda_omega, "Override the frequency-loss weight");
  };
  auto* c_fit2 = app.add_subcommand("fit2d", "Fit a 2D splat image");
  add_fit(c_fit2, fit2, "Target PPM");
  c_fit2->add_option("--init", fit2.init, "Initial 2d scene file")->check(CLI::ExistingFile);
  c_fit2->add_flag("--baseline", fit2.baseline, "Gaussian baseline (fixed beta = 2)");
  auto* c_fit3 = app.add_subcommand("fit3d", "Fit a 3D scene to a dataset directory");
  add_fit(c_fit3, fit3, "Dataset directory");
  c_fit3->add_option("--init", fit3.init, "Initial 3d scene file")->check(CLI::ExistingFile);
  c_fit3->add_flag("--baseline", fit3.baseline, "Gaussian baseline (fixed beta = 2)");

  std::string scene_path, camera_path;
  int rw = 0, rh = 0;
  auto* c_render = app.add_subcommand("render", "Render a scene file");
  c_render->add_option("scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
  c_render->add_option("--camera", camera_path, "Camera file (3d scenes)")->check(CLI::ExistingFile);
  c_render->add_option("--width", rw, "Image width");
  c_render->add_option("--height", rh, "Image height");

  int bench_seeds = 5;
  auto* c_bench = app.add_subcommand("bench", "Paired GES vs Gaussian fits over several seeds");
  add_fit(c_bench, bench, "Target PPM");
  bench.splats = 50;
  c_bench->add_option("--seeds", bench_seeds, "Number of seeds (seed, seed + 1, ...)");

  std::string synth_kind = "checker";
  int synth_size = 64, synth_splats = 50, synth_cams = 8;
  double synth_perturb = 0.1;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic target image or 3d dataset");
  c_synth->add_option("kind", synth_kind, "checker, square or 3d")->required();
  c_synth->add_option("--size", synth_size, "Image size");
  c_synth->add_option("--splats", synth_splats, "Ground-truth splats (3d)");
  c_synth->add_option("--cameras", synth_cams, "Training cameras (3d)");
  c_synth->add_option("--perturb", synth_perturb, "Initialization jitter (3d)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (seed_opt->count() > 0) g.seed_flag = seed;

  try {
    if (*c_sim) return cmd_sim1d(g, sim);
    if (*c_thm) return cmd_theorem1(g, amplitude, widths, alphas);
    if (*c_eta) return cmd_eta(g, betas, eta_samples);
    if (*c_mask) return cmd_mask(g, mask_image, omegas);
    if (*c_fit2) return cmd_fit2d(g, fit2);
    if (*c_fit3) return cmd_fit3d(g, fit3);
    if (*c_render) return cmd_render(g, scene_path, camera_path, rw, rh);
    if (*c_bench) return cmd_bench(g, bench, bench_seeds);
    if (*c_synth) return cmd_synth(g, synth_kind, synth_size, synth_splats, synth_cams, synth_perturb);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const train::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
