#include "salttrack/tracker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "salttrack/error.hpp"

namespace salttrack {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::full:
      return "full";
    case Variant::no_contrast:
      return "no_contrast";
    case Variant::vectorized:
      return "vectorized";
  }
  return "full";
}

Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::full;
  if (name == "no_contrast") return Variant::no_contrast;
  if (name == "vectorized") return Variant::vectorized;
  fail(ErrorKind::usage, "unknown variant '" + name + "'");
}

void TrackerConfig::validate() const {
  if (patch.i1 < 3 || patch.i2 < 3 || patch.i1 % 2 == 0 || patch.i2 % 2 == 0) {
    fail(ErrorKind::usage, "patch dims must be odd and >= 3");
  }
  if (subspace.p1 < 1 || subspace.p2 < 1 || subspace.p3 < 1) {
    fail(ErrorKind::usage, "subspace dims must be >= 1");
  }
  if (!(error_threshold > 0.0)) fail(ErrorKind::usage, "error threshold must be positive");
  if (!(contrast_floor > 0.0 && contrast_floor < 1.0)) {
    fail(ErrorKind::usage, "contrast floor must lie in (0,1)");
  }
  if (median_window < 1) fail(ErrorKind::usage, "median window must be >= 1");
  glcm.validate();
}

PatchPair extract_patch_pair(const SeismicSection& section, const ContrastMap& contrast,
                             Point center, PatchDims dims) {
  const SectionExtent extent{section.grid.width(), section.grid.height()};
  if (dims.i1 < 1 || dims.i2 < 1 || dims.i1 % 2 == 0 || dims.i2 % 2 == 0) {
    fail(ErrorKind::usage, "patch dims must be odd");
  }
  if (!patch_admissible(center, dims, extent)) {
    fail(ErrorKind::data, "patch overruns the section border");
  }
  const int h1 = dims.i1 / 2;
  const int h2 = dims.i2 / 2;
  PatchPair p{Matrix(dims.i1, dims.i2), Matrix(dims.i1, dims.i2)};
  for (int b = 0; b < dims.i2; ++b) {
    for (int a = 0; a < dims.i1; ++a) {
      const int x = center.x - h1 + a;
      const int y = center.y - h2 + b;
      p.amplitude(a, b) = section.grid(x, y);
      p.contrast(a, b) = contrast.grid(x, y);
    }
  }
  return p;
}

TensorPair make_tensor_pair(const PatchPair& first, const TrackerConfig& cfg) {
  TensorPair pair{TextureStack(first.amplitude, cfg.subspace, cfg.uses_spatial_modes()),
                  std::nullopt};
  if (cfg.uses_contrast()) {
    pair.contrast.emplace(first.contrast, cfg.subspace, cfg.uses_spatial_modes());
  }
  return pair;
}

double weighted_error(const PatchPair& patch, const SubspaceBasis& amplitude_basis,
                      const SubspaceBasis* contrast_basis, double lambda_s, double lambda_c,
                      Variant variant) {
  const ModalResiduals rs = modal_residuals(patch.amplitude, amplitude_basis);
  if (variant == Variant::no_contrast || contrast_basis == nullptr) {
    return lambda_s * rs.total();
  }
  const ModalResiduals rc = modal_residuals(patch.contrast, *contrast_basis);
  if (variant == Variant::vectorized) {
    return lambda_s * rs.mode3 + lambda_c * rc.mode3;
  }
  return lambda_s * rs.total() + lambda_c * rc.total();
}

namespace {

struct PairTrial {
  TextureStack::Trial amplitude;
  std::optional<TextureStack::Trial> contrast;
};

PairTrial trial_pair(const TensorPair& pair, const PatchPair& patch) {
  PairTrial t{pair.amplitude.trial(patch.amplitude), std::nullopt};
  if (pair.contrast) t.contrast = pair.contrast->trial(patch.contrast);
  return t;
}

double trial_error(const PairTrial& t, const PatchPair& patch, double lambda_s, double lambda_c,
                   Variant variant) {
  return weighted_error(patch, t.amplitude.basis, t.contrast ? &t.contrast->basis : nullptr,
                        lambda_s, lambda_c, variant);
}

void commit_pair(TensorPair& pair, const PatchPair& patch, PairTrial t) {
  pair.amplitude.commit(patch.amplitude, std::move(t.amplitude));
  if (pair.contrast) pair.contrast->commit(patch.contrast, std::move(*t.contrast));
}

}  // namespace

ClassifiedModel classify_tensors(const SeismicSection& reference,
                                 const ContrastMap& reference_contrast,
                                 const BoundaryCurve& curve, int reference_inline,
                                 const TrackerConfig& cfg) {
  cfg.validate();
  if (curve.points.empty()) fail(ErrorKind::data, "empty reference curve");
  const SectionExtent extent{reference.grid.width(), reference.grid.height()};

  ClassifiedModel model;
  model.reference_inline = reference_inline;
  model.reference_curve = curve;
  model.assignment.assign(curve.size(), -1);

  for (std::size_t i = 0; i < curve.size(); ++i) {
    const Point p = curve.points[i];
    if (!patch_admissible(p, cfg.patch, extent)) {
      model.skipped.push_back(i);
      continue;
    }
    const PatchPair patch = extract_patch_pair(reference, reference_contrast, p, cfg.patch);
    if (model.tensors.empty()) {
      model.tensors.push_back(make_tensor_pair(patch, cfg));
    } else {
      TensorPair& current = model.tensors.back();
      PairTrial t = trial_pair(current, patch);
      const double e = trial_error(t, patch, 1.0, 1.0, cfg.variant);
      if (e <= cfg.error_threshold) {
        commit_pair(current, patch, std::move(t));
      } else {
        model.tensors.push_back(make_tensor_pair(patch, cfg));
      }
    }
    model.assignment[i] = static_cast<int>(model.tensors.size()) - 1;
  }
  if (model.tensors.empty()) fail(ErrorKind::data, "no admissible reference point");
  return model;
}

double contrast_weight(double contrast, double floor) {
  return std::abs(std::log(std::clamp(contrast, floor, 1.0)));
}

Localization localize_tracked_point(TensorPair& pair, std::span<const Candidate> candidates,
                                    const TrackerConfig& cfg) {
  if (candidates.empty()) fail(ErrorKind::data, "no admissible candidate");
  Localization loc;
  loc.errors.reserve(candidates.size());
  double e_min = std::numeric_limits<double>::infinity();
  std::optional<PairTrial> best_trial;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const Candidate& c = candidates[j];
    PairTrial t = trial_pair(pair, c.patches);
    const double lambda_c = cfg.uses_contrast() ? contrast_weight(c.contrast, cfg.contrast_floor) : 0.0;
    const double e = trial_error(t, c.patches, 1.0, lambda_c, cfg.variant);
    loc.errors.push_back(e);
    if (e <= e_min) {
      e_min = e;
      loc.best = j;
      best_trial = std::move(t);
    }
  }
  const Candidate& winner = candidates[loc.best];
  loc.offset = winner.offset;
  loc.position = winner.position;
  loc.error = e_min;
  commit_pair(pair, winner.patches, std::move(*best_trial));
  return loc;
}

namespace {

std::vector<Candidate> make_candidates(const SeismicSection& section, const ContrastMap& contrast,
                                       Point center, Vec2 normal, int radius,
                                       const TrackerConfig& cfg, const SearchMask* mask) {
  const SectionExtent extent{section.grid.width(), section.grid.height()};
  // rounded pixel -> smallest |offset| that lands on it
  std::map<std::pair<int, int>, int> chosen;
  for (int k = -radius; k <= radius; ++k) {
    const Point q{static_cast<int>(std::lround(center.x + k * normal.x)),
                  static_cast<int>(std::lround(center.y + k * normal.y))};
    auto [it, inserted] = chosen.try_emplace({q.x, q.y}, k);
    if (!inserted && std::abs(k) < std::abs(it->second)) it->second = k;
  }
  std::vector<std::pair<int, Point>> ordered;
  for (const auto& [xy, k] : chosen) ordered.push_back({k, Point{xy.first, xy.second}});
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Candidate> out;
  for (const auto& [k, q] : ordered) {
    if (!patch_admissible(q, cfg.patch, extent)) continue;
    if (mask != nullptr && (!mask->contains(q) || (*mask)(q.x, q.y) == 0)) continue;
    Candidate c;
    c.offset = k;
    c.position = q;
    c.patches = extract_patch_pair(section, contrast, q, cfg.patch);
    c.contrast = contrast.grid(q.x, q.y);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TrackedBoundary track_section(const ClassifiedModel& model, const SeismicSection& predicted,
                              const TrackerConfig& cfg, const SearchMask* mask) {
  cfg.validate();
  const int radius = std::abs(predicted.inline_no - model.reference_inline);
  if (radius < 1) {
    fail(ErrorKind::usage, "predicted inline must differ from the reference inline");
  }
  const SeismicSection section = predicted.normalized ? predicted : normalize_section(predicted);
  const ContrastMap contrast = contrast_map(section, cfg.glcm);
  std::vector<TensorPair> tensors = model.tensors;

  TrackedBoundary out;
  out.inline_no = predicted.inline_no;
  const auto curve_pts = to_vec2(model.reference_curve.points);
  for (std::size_t i = 0; i < model.reference_curve.size(); ++i) {
    const int k = model.assignment[i];
    if (k < 0) {
      out.skipped.push_back(i);
      continue;
    }
    Vec2 normal;
    try {
      normal = normal_at(curve_pts, i, cfg.normal_half_window);
    } catch (const Error&) {
      out.skipped.push_back(i);
      continue;
    }
    const auto candidates = make_candidates(section, contrast, model.reference_curve.points[i],
                                            normal, radius, cfg, mask);
    if (candidates.empty()) {
      out.skipped.push_back(i);
      continue;
    }
    const Localization loc =
        localize_tracked_point(tensors[static_cast<std::size_t>(k)], candidates, cfg);
    out.points.push_back({i, loc.position, loc.offset, loc.error, k, true});
  }

  std::vector<int> offsets;
  offsets.reserve(out.points.size());
  for (const auto& tp : out.points) offsets.push_back(tp.offset);
  const FilterResult filtered = filter_tracked_points(offsets, cfg.median_window, cfg.rejection_px);
  std::vector<Point> kept;
  for (std::size_t j = 0; j < out.points.size(); ++j) {
    out.points[j].kept = filtered.keep[j];
    if (filtered.keep[j]) kept.push_back(out.points[j].position);
  }
  out.curve = connect_points(kept);
  return out;
}

ClassifiedModel build_model(const SeismicVolume& volume, int reference_inline,
                            const BoundaryRecord& boundary, const TrackerConfig& cfg) {
  cfg.validate();
  if (boundary.inline_no != reference_inline) {
    fail(ErrorKind::data, "boundary inline " + std::to_string(boundary.inline_no) +
                              " is not the reference inline " +
                              std::to_string(reference_inline));
  }
  const SeismicSection reference = normalize_section(volume.section(reference_inline));
  const SectionExtent extent{reference.grid.width(), reference.grid.height()};
  validate_boundary(boundary, extent);
  const ContrastMap contrast = contrast_map(reference, cfg.glcm);
  const BoundaryCurve curve = order_boundary(boundary.points, cfg.patch, extent);
  return classify_tensors(reference, contrast, curve, reference_inline, cfg);
}

SearchMask mask_section(const SeismicVolume& volume, int inline_no) {
  const SeismicSection s = volume.section(inline_no);
  SearchMask mask(s.grid.width(), s.grid.height(), 0);
  for (int x = 0; x < mask.width(); ++x) {
    for (int y = 0; y < mask.height(); ++y) mask(x, y) = s.grid(x, y) != 0.0 ? 1 : 0;
  }
  return mask;
}

std::vector<SectionResult> track_volume(const SeismicVolume& volume, int reference_inline,
                                        const BoundaryRecord& boundary, int first, int last,
                                        const TrackerConfig& cfg, int jobs,
                                        const SeismicVolume* search_mask) {
  if (first > last) std::swap(first, last);
  const auto& h = volume.header();
  if (!h.has_inline(first) || !h.has_inline(last)) {
    fail(ErrorKind::usage, "inline range outside the volume");
  }
  if (reference_inline < first || reference_inline > last) {
    fail(ErrorKind::usage, "reference inline outside the tracking range");
  }
  if (search_mask != nullptr) {
    const auto& mh = search_mask->header();
    if (mh.inline_start != h.inline_start || mh.inline_count != h.inline_count ||
        mh.crossline_count != h.crossline_count || mh.time_count != h.time_count) {
      fail(ErrorKind::data, "search mask geometry differs from the volume");
    }
  }
  const ClassifiedModel model = build_model(volume, reference_inline, boundary, cfg);

  std::vector<SectionResult> results;
  for (int il = first; il <= last; ++il) {
    if (il != reference_inline) results.push_back({il, std::nullopt, {}, 0});
  }
  auto run_one = [&](SectionResult& r) {
    try {
      if (search_mask != nullptr) {
        const SearchMask mask = mask_section(*search_mask, r.inline_no);
        r.boundary = track_section(model, volume.section(r.inline_no), cfg, &mask);
      } else {
        r.boundary = track_section(model, volume.section(r.inline_no), cfg);
      }
    } catch (const Error& e) {
      r.error = e.what();
      r.error_code = e.exit_code();
    } catch (const std::exception& e) {
      r.error = e.what();
      r.error_code = static_cast<int>(ErrorKind::numerical);
    }
  };
  const int workers = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(results.size(), 1)));
  if (workers == 1) {
    for (auto& r : results) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < results.size(); i = next++) run_one(results[i]);
      });
    }
    for (auto& t : pool) t.join();
  }
  return results;
}

}  // namespace salttrack
