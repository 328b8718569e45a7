#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>

#include "salttrack/boundary.hpp"
#include "salttrack/error.hpp"
#include "salttrack/render.hpp"
#include "salttrack/synthgen.hpp"
#include "salttrack/texture.hpp"
#include "salttrack/tracker.hpp"
#include "salttrack/volume_io.hpp"

namespace salttrack::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string inline_stem(int inline_no) { return "inline_" + std::to_string(inline_no); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::data, "cannot write " + path.string());
  f << text;
  if (!f) fail(ErrorKind::data, "write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::data, "cannot create " + dir.string() + ": " + ec.message());
}

std::pair<int, int> parse_range(const std::string& text) {
  static const std::regex re(R"(^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) fail(ErrorKind::usage, "range must look like A..B");
  return {std::stoi(m[1]), std::stoi(m[2])};
}

PatchDims parse_patch(const std::string& text) {
  static const std::regex re(R"(^(\d+)x(\d+)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) fail(ErrorKind::usage, "patch must look like 31x31");
  return {std::stoi(m[1]), std::stoi(m[2])};
}

SubspaceDims parse_subspace(const std::string& text) {
  static const std::regex re(R"(^(\d+),(\d+),(\d+)$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) fail(ErrorKind::usage, "subspace must look like 15,15,5");
  return {std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])};
}

int resolve_jobs(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("SALTTRACK_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::usage, "SALTTRACK_JOBS must be a positive integer");
  }
  return 1;
}

json glcm_json(const GlcmConfig& g) {
  return {{"radius", g.radius}, {"levels", g.levels}, {"offsets", g.offset_count()}};
}

json config_json(const TrackerConfig& c) {
  return {{"variant", to_string(c.variant)},
          {"patch", {c.patch.i1, c.patch.i2}},
          {"subspace", {c.subspace.p1, c.subspace.p2, c.subspace.p3}},
          {"error_threshold", c.error_threshold},
          {"glcm", glcm_json(c.glcm)},
          {"contrast_floor", c.contrast_floor},
          {"median_window", c.median_window},
          {"rejection_px", c.rejection_px},
          {"normal_half_window", c.normal_half_window}};
}

Image section_image(const SeismicSection& raw) {
  return render_gray(normalize_section_or_zero(raw).grid);
}

/// Finds every boundary CSV in a directory and indexes it by inline.
std::map<int, fs::path> boundary_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::data, "not a directory: " + dir.string());
  std::vector<fs::path> csvs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") csvs.push_back(e.path());
  }
  std::sort(csvs.begin(), csvs.end());
  std::map<int, fs::path> out;
  for (const auto& p : csvs) {
    const BoundaryRecord r = load_boundary(p);
    if (!out.emplace(r.inline_no, p).second) {
      fail(ErrorKind::data, "two boundary files for inline " + std::to_string(r.inline_no) +
                                " in " + dir.string());
    }
  }
  return out;
}

void write_manifest(const fs::path& dir, const json& manifest) {
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  SynthSpec spec;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  const SynthResult r = generate(a.spec);
  const fs::path dir(a.out);
  ensure_dir(dir / "truth");
  save_volume(r.volume, dir / "volume");
  json outputs = json::array({(dir / "volume").string()});
  for (const auto& t : r.truth) {
    const fs::path p = dir / "truth" / (inline_stem(t.inline_no) + ".csv");
    save_boundary(t, p);
    outputs.push_back(p.string());
  }
  const auto& s = a.spec;
  json m;
  m["command"] = "synth";
  m["config"] = {{"inline_start", s.inline_start},   {"inline_count", s.inline_count},
                 {"crossline_start", s.crossline_start}, {"crossline_count", s.crossline_count},
                 {"time_start_ms", s.time_start_ms}, {"time_step_ms", s.time_step_ms},
                 {"time_count", s.time_count},       {"center_x", s.center_x},
                 {"center_y", s.center_y},           {"radius_x", s.radius_x},
                 {"radius_y", s.radius_y},           {"flank_bottom", s.flank_bottom},
                 {"drift", s.drift},                 {"layer_period", s.layer_period},
                 {"layer_dip", s.layer_dip},         {"boundary_reflection", s.boundary_reflection},
                 {"reflection_width", s.reflection_width}, {"noise_sigma", s.noise_sigma},
                 {"seed", s.seed}};
  m["inputs"] = json::object();
  m["outputs"] = outputs;
  m["timings"] = {{"total_s", seconds_since(t0)}};
  write_manifest(dir, m);
  out << "wrote " << s.inline_count << " inlines to " << dir.string() << "\n";
  return 0;
}

// ------------------------------------------------------------ attribute

struct AttributeArgs {
  std::string volume;
  int inline_no = 0;
  std::string out;
  std::string render;
  GlcmConfig glcm;
};

int cmd_attribute(const AttributeArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  const SeismicVolume vol = load_volume(a.volume);
  if (!vol.header().has_inline(a.inline_no)) {
    fail(ErrorKind::usage, "inline " + std::to_string(a.inline_no) + " is not in the volume");
  }
  const SeismicSection sec = normalize_section_or_zero(vol.section(a.inline_no));
  const ContrastMap cm = contrast_map(sec, a.glcm);
  PlaneFile plane{"glcm_contrast", a.inline_no, Grid2D<float>(cm.grid.width(), cm.grid.height())};
  for (int x = 0; x < cm.grid.width(); ++x) {
    for (int y = 0; y < cm.grid.height(); ++y) plane.grid(x, y) = static_cast<float>(cm.grid(x, y));
  }
  const fs::path dir(a.out);
  ensure_dir(dir);
  save_plane(plane, dir);
  json outputs = json::array({dir.string()});
  if (!a.render.empty()) {
    save_ppm(a.render, render_gray(cm.grid));
    outputs.push_back(a.render);
  }
  json m;
  m["command"] = "attribute";
  m["config"] = {{"inline", a.inline_no}, {"glcm", glcm_json(a.glcm)}};
  m["inputs"] = {{"volume", a.volume}};
  m["outputs"] = outputs;
  m["degenerate"] = cm.degenerate;
  m["timings"] = {{"total_s", seconds_since(t0)}};
  write_manifest(dir, m);
  out << "contrast map of inline " << a.inline_no << " written to " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- track

struct TrackArgs {
  std::string volume;
  std::string boundary;
  int reference = 0;
  std::string range;
  std::string out;
  std::string truth;
  std::string search_mask;
  std::string variant = "full";
  std::string patch = "31x31";
  std::string subspace = "15,15,5";
  double threshold = 3.0;
  int jobs = 0;
  int segments = 10;
  bool render = false;
  GlcmConfig glcm;
};

json diagnostics_json(const TrackedBoundary& tb) {
  json pts = json::array();
  for (const auto& p : tb.points) {
    pts.push_back({{"curve_index", p.curve_index},
                   {"x", p.position.x},
                   {"y", p.position.y},
                   {"offset", p.offset},
                   {"e_min", p.error},
                   {"tensor", p.tensor},
                   {"kept", p.kept}});
  }
  return {{"inline", tb.inline_no}, {"points", pts}, {"skipped", tb.skipped}};
}

int cmd_track(const TrackArgs& a, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  TrackerConfig cfg;
  cfg.variant = parse_variant(a.variant);
  cfg.patch = parse_patch(a.patch);
  cfg.subspace = parse_subspace(a.subspace);
  cfg.error_threshold = a.threshold;
  cfg.glcm = a.glcm;
  cfg.validate();
  const auto [first, last] = parse_range(a.range);
  const int jobs = resolve_jobs(a.jobs);
  if (a.segments < 1) fail(ErrorKind::usage, "segments must be >= 1");

  const SeismicVolume vol = load_volume(a.volume);
  const auto& h = vol.header();
  const SectionExtent extent{h.crossline_count, h.time_count};
  const BoundaryRecord ref = load_boundary(a.boundary, extent);
  std::map<int, fs::path> truth;
  if (!a.truth.empty()) truth = boundary_files(a.truth);

  std::optional<SeismicVolume> mask;
  if (!a.search_mask.empty()) mask = load_volume(a.search_mask);

  const auto t_track = Clock::now();
  const auto results =
      track_volume(vol, a.reference, ref, first, last, cfg, jobs, mask ? &*mask : nullptr);
  const double track_s = seconds_since(t_track);

  const fs::path dir(a.out);
  ensure_dir(dir);
  json sections = json::array();
  json outputs = json::array();
  int code = 0;
  for (const auto& r : results) {
    json s{{"inline", r.inline_no}};
    if (!r.boundary) {
      s["status"] = "failed";
      s["error"] = r.error;
      s["exit_code"] = r.error_code;
      code = std::max(code, r.error_code);
      err << "inline " << r.inline_no << ": " << r.error << "\n";
      sections.push_back(s);
      continue;
    }
    const TrackedBoundary& tb = *r.boundary;
    const fs::path csv = dir / (inline_stem(r.inline_no) + ".csv");
    const fs::path diag = dir / (inline_stem(r.inline_no) + ".json");
    save_boundary({r.inline_no, tb.curve.points}, csv);
    write_text(diag, diagnostics_json(tb).dump(2) + "\n");
    outputs.push_back(csv.string());
    outputs.push_back(diag.string());
    std::size_t rejected = 0;
    for (const auto& p : tb.points) rejected += p.kept ? 0 : 1;
    s["status"] = "ok";
    s["points"] = tb.curve.size();
    s["tracked_points"] = tb.points.size();
    s["rejected_points"] = rejected;
    s["skipped_points"] = tb.skipped.size();
    if (auto it = truth.find(r.inline_no); it != truth.end()) {
      const BoundaryCurve t{load_boundary(it->second).points};
      const SimilarityReport rep = similarity_index(tb.curve, t, a.segments);
      s["similarity_index"] = rep.similarity_index;
      s["mean_segment_frechet"] = rep.mean_segment_frechet;
      s["mean_deviation"] = mean_deviation(tb.curve, t);
    }
    if (a.render) {
      Image img = section_image(vol.section(r.inline_no));
      burn_curve(img, BoundaryCurve{ref.points}, parse_color("blue"));
      burn_curve(img, tb.curve, parse_color("green"));
      const fs::path ppm = dir / (inline_stem(r.inline_no) + ".ppm");
      save_ppm(ppm, img);
      outputs.push_back(ppm.string());
    }
    sections.push_back(s);
  }

  json m;
  m["command"] = "track";
  m["config"] = config_json(cfg);
  m["config"]["reference"] = a.reference;
  m["config"]["range"] = {first, last};
  m["config"]["segments"] = a.segments;
  m["inputs"] = {{"volume", a.volume}, {"boundary", a.boundary}};
  if (!a.truth.empty()) m["inputs"]["truth"] = a.truth;
  if (!a.search_mask.empty()) m["inputs"]["search_mask"] = a.search_mask;
  m["outputs"] = outputs;
  m["sections"] = sections;
  m["timings"] = {{"tracking_s", track_s}, {"total_s", seconds_since(t0)}, {"jobs", jobs}};
  write_manifest(dir, m);
  out << "tracked " << results.size() << " sections into " << dir.string() << "\n";
  return code;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string tracked;
  std::string truth;
  int segments = 10;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  if (a.segments < 1) fail(ErrorKind::usage, "segments must be >= 1");
  const bool dir_mode = fs::is_directory(a.tracked);
  if (dir_mode != fs::is_directory(a.truth)) {
    fail(ErrorKind::usage, "tracked and truth must both be files or both be directories");
  }
  std::string text;
  if (!dir_mode) {
    const BoundaryRecord t = load_boundary(a.tracked);
    const BoundaryRecord g = load_boundary(a.truth);
    if (t.inline_no != g.inline_no) {
      fail(ErrorKind::data, "inline mismatch: tracked " + std::to_string(t.inline_no) +
                                " vs truth " + std::to_string(g.inline_no));
    }
    const BoundaryCurve tc{t.points};
    const BoundaryCurve gc{g.points};
    const SimilarityReport rep = similarity_index(tc, gc, a.segments);
    const json j{{"inline", t.inline_no},
                 {"segments", a.segments},
                 {"mean_segment_frechet", rep.mean_segment_frechet},
                 {"similarity_index", rep.similarity_index},
                 {"per_segment", rep.per_segment},
                 {"mean_deviation", mean_deviation(tc, gc)}};
    text = j.dump(2) + "\n";
  } else {
    const auto tracked = boundary_files(a.tracked);
    const auto truth = boundary_files(a.truth);
    std::ostringstream csv;
    csv << "inline,similarity_index,mean_segment_frechet,mean_deviation\n";
    csv.precision(6);
    csv << std::fixed;
    for (const auto& [il, path] : tracked) {
      auto it = truth.find(il);
      if (it == truth.end()) fail(ErrorKind::data, "no truth for inline " + std::to_string(il));
      const BoundaryCurve tc{load_boundary(path).points};
      const BoundaryCurve gc{load_boundary(it->second).points};
      const SimilarityReport rep = similarity_index(tc, gc, a.segments);
      csv << il << ',' << rep.similarity_index << ',' << rep.mean_segment_frechet << ','
          << mean_deviation(tc, gc) << '\n';
    }
    text = csv.str();
  }
  if (a.out.empty()) {
    out << text;
  } else {
    write_text(a.out, text);
  }
  return 0;
}

// --------------------------------------------------------------- render

struct RenderArgs {
  std::string volume;
  int inline_no = 0;
  std::vector<std::string> boundaries;
  std::vector<std::string> colors;
  std::string out;
  std::string svg;
  bool contrast = false;
  GlcmConfig glcm;
};

int cmd_render(const RenderArgs& a, std::ostream& out) {
  static const std::vector<std::string> palette{"blue", "green", "red", "yellow", "cyan", "magenta"};
  if (!a.colors.empty() && a.colors.size() != a.boundaries.size()) {
    fail(ErrorKind::usage, "got " + std::to_string(a.boundaries.size()) + " boundaries but " +
                               std::to_string(a.colors.size()) + " colors");
  }
  const SeismicVolume vol = load_volume(a.volume);
  if (!vol.header().has_inline(a.inline_no)) {
    fail(ErrorKind::usage, "inline " + std::to_string(a.inline_no) + " is not in the volume");
  }
  const SeismicSection raw = vol.section(a.inline_no);
  Image img = a.contrast ? render_gray(contrast_map(normalize_section_or_zero(raw), a.glcm).grid)
                         : section_image(raw);
  std::vector<ColoredCurve> curves;
  for (std::size_t i = 0; i < a.boundaries.size(); ++i) {
    const BoundaryRecord r =
        load_boundary(a.boundaries[i], SectionExtent{img.width(), img.height()});
    if (r.inline_no != a.inline_no) {
      fail(ErrorKind::data, a.boundaries[i] + " is on inline " + std::to_string(r.inline_no));
    }
    const std::string& name = a.colors.empty() ? palette[i % palette.size()] : a.colors[i];
    curves.push_back({BoundaryCurve{r.points}, parse_color(name)});
  }
  for (const auto& c : curves) burn_curve(img, c.curve, c.color);
  save_ppm(a.out, img);
  if (!a.svg.empty()) write_text(a.svg, svg_overlay(img.width(), img.height(), curves));
  out << "rendered inline " << a.inline_no << " to " << a.out << "\n";
  return 0;
}

void add_glcm_flags(CLI::App* app, GlcmConfig& g) {
  app->add_option("--radius", g.radius, "GLCM window half size")->capture_default_str();
  app->add_option("--levels", g.levels, "GLCM quantization levels")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Salt-dome boundary tracking with texture tensors", "salttrack"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic volume with ground truth");
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--seed", synth.spec.seed)->capture_default_str();
  s->add_option("--inlines", synth.spec.inline_count)->capture_default_str();
  s->add_option("--crosslines", synth.spec.crossline_count)->capture_default_str();
  s->add_option("--samples", synth.spec.time_count)->capture_default_str();
  s->add_option("--drift", synth.spec.drift, "crosslines per inline")->capture_default_str();
  s->add_option("--noise", synth.spec.noise_sigma)->capture_default_str();
  s->add_option("--reflection", synth.spec.boundary_reflection)->capture_default_str();

  AttributeArgs attr;
  auto* at = app.add_subcommand("attribute", "Compute the GLCM contrast map of one inline");
  at->add_option("--volume", attr.volume)->required();
  at->add_option("--inline", attr.inline_no)->required();
  at->add_option("--out", attr.out, "output plane directory")->required();
  at->add_option("--render", attr.render, "also write a PPM raster");
  add_glcm_flags(at, attr.glcm);

  TrackArgs track;
  auto* tr = app.add_subcommand("track", "Track a labeled boundary through neighboring inlines");
  tr->add_option("--volume", track.volume)->required();
  tr->add_option("--boundary", track.boundary, "reference boundary CSV")->required();
  tr->add_option("--reference", track.reference, "reference inline")->required();
  tr->add_option("--range", track.range, "inline range A..B")->required();
  tr->add_option("--out", track.out)->required();
  tr->add_option("--truth", track.truth, "directory of ground-truth CSVs");
  tr->add_option("--search-mask", track.search_mask,
                 "volume whose nonzero samples mark allowed candidate positions");
  tr->add_option("--variant", track.variant)
      ->check(CLI::IsMember({"full", "no_contrast", "vectorized"}))
      ->capture_default_str();
  tr->add_option("--patch", track.patch)->capture_default_str();
  tr->add_option("--subspace", track.subspace)->capture_default_str();
  tr->add_option("--threshold", track.threshold)->capture_default_str();
  tr->add_option("--jobs", track.jobs, "worker threads (default SALTTRACK_JOBS or 1)");
  tr->add_option("--segments", track.segments)->capture_default_str();
  tr->add_flag("--render", track.render, "write overlay rasters");
  add_glcm_flags(tr, track.glcm);

  EvaluateArgs eval;
  auto* ev = app.add_subcommand("evaluate", "Compare tracked boundaries with ground truth");
  ev->add_option("--tracked", eval.tracked, "CSV file or directory")->required();
  ev->add_option("--truth", eval.truth, "CSV file or directory")->required();
  ev->add_option("--segments", eval.segments)->capture_default_str();
  ev->add_option("--out", eval.out, "write here instead of stdout");

  RenderArgs rend;
  auto* rn = app.add_subcommand("render", "Render a section with boundary overlays");
  rn->add_option("--volume", rend.volume)->required();
  rn->add_option("--inline", rend.inline_no)->required();
  rn->add_option("--boundary", rend.boundaries, "boundary CSV (repeatable)");
  rn->add_option("--color", rend.colors, "one color per boundary");
  rn->add_option("--out", rend.out, "PPM path")->required();
  rn->add_option("--svg", rend.svg, "SVG overlay path");
  rn->add_flag("--contrast", rend.contrast, "render the contrast map instead of amplitudes");
  add_glcm_flags(rn, rend.glcm);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::usage);
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (at->parsed()) return cmd_attribute(attr, out);
    if (tr->parsed()) return cmd_track(track, out, err);
    if (ev->parsed()) return cmd_evaluate(eval, out);
    if (rn->parsed()) return cmd_render(rend, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::data);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::numerical);
  }
  return static_cast<int>(ErrorKind::usage);
}

}  // namespace salttrack::cli
