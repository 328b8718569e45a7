#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salttrack/boundary.hpp"
#include "salttrack/tensor.hpp"
#include "salttrack/texture.hpp"
#include "salttrack/volume_io.hpp"

namespace salttrack {

/// Which reconstruction terms take part in matching.
///  - full:        amplitude and contrast, modes 1, 2 and 3
///  - no_contrast: amplitude only, modes 1, 2 and 3
///  - vectorized:  amplitude and contrast, mode 3 (vectorized patches) only
enum class Variant { full, no_contrast, vectorized };

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);

struct TrackerConfig {
  PatchDims patch{31, 31};
  SubspaceDims subspace{15, 15, 5};
  double error_threshold = 3.0;  // classification threshold on e
  GlcmConfig glcm;
  Variant variant = Variant::full;
  double contrast_floor = 1e-3;  // lower clamp of the contrast weight source
  int median_window = 5;
  double rejection_px = 3.0;
  int normal_half_window = 5;

  void validate() const;
  bool uses_contrast() const noexcept { return variant != Variant::no_contrast; }
  bool uses_spatial_modes() const noexcept { return variant != Variant::vectorized; }
};

/// Amplitude and contrast windows around one point, I1 x I2 each (rows run
/// along crossline, columns along time).
struct PatchPair {
  Matrix amplitude;
  Matrix contrast;
};

/// Copies the patch pair centered at `center`. Throws Error(data) when the
/// patch overruns the section.
PatchPair extract_patch_pair(const SeismicSection& section, const ContrastMap& contrast,
                             Point center, PatchDims dims);

/// One class of boundary texture: stacked amplitude patches and, unless the
/// contrast attribute is disabled, the matching contrast patches.
struct TensorPair {
  TextureStack amplitude;
  std::optional<TextureStack> contrast;

  int member_count() const noexcept { return amplitude.member_count(); }
};

TensorPair make_tensor_pair(const PatchPair& first, const TrackerConfig& cfg);

struct ClassifiedModel {
  std::vector<TensorPair> tensors;
  /// Tensor index per reference curve point, -1 for skipped points.
  std::vector<int> assignment;
  int reference_inline = 0;
  BoundaryCurve reference_curve;
  std::vector<std::size_t> skipped;
};

/// Weighted reconstruction error of a patch pair against trial bases, with the
/// variant deciding which terms contribute.
double weighted_error(const PatchPair& patch, const SubspaceBasis& amplitude_basis,
                      const SubspaceBasis* contrast_basis, double lambda_s,
                      double lambda_c, Variant variant);

/// Groups reference patches into texture tensors while walking the ordered
/// curve: each new patch pair is tried against the current pair extended by
/// itself and kept there when the unweighted error is <= the threshold,
/// otherwise it opens the next tensor pair.
ClassifiedModel classify_tensors(const SeismicSection& reference,
                                 const ContrastMap& reference_contrast,
                                 const BoundaryCurve& curve, int reference_inline,
                                 const TrackerConfig& cfg);

struct Candidate {
  int offset = 0;  // signed step along the search normal
  Point position;
  PatchPair patches;
  double contrast = 0.0;  // normalized contrast at `position`
};

/// |log(clamp(c, floor, 1))|
double contrast_weight(double contrast, double floor);

struct Localization {
  std::size_t best = 0;  // index into the candidate list
  int offset = 0;
  Point position;
  double error = 0.0;
  std::vector<double> errors;  // per candidate
};

/// Scores every candidate against the pair extended by that candidate, keeps
/// the last minimum (ties go to the later candidate) and appends the winner
/// to `pair`.
Localization localize_tracked_point(TensorPair& pair, std::span<const Candidate> candidates,
                                    const TrackerConfig& cfg);

struct TrackedPoint {
  std::size_t curve_index = 0;  // index on the reference curve
  Point position;
  int offset = 0;
  double error = 0.0;
  int tensor = 0;
  bool kept = true;
};

struct TrackedBoundary {
  int inline_no = 0;
  BoundaryCurve curve;
  std::vector<TrackedPoint> points;
  /// Reference points without any admissible candidate.
  std::vector<std::size_t> skipped;
};

/// Optional per-pixel restriction on candidate positions.
using SearchMask = Grid2D<unsigned char>;

/// Localizes the reference boundary in `predicted` (raw or normalized) using a
/// private copy of the model's tensors. Candidates lie at integer steps
/// -R..R along each point normal, R being the inline distance.
TrackedBoundary track_section(const ClassifiedModel& model, const SeismicSection& predicted,
                              const TrackerConfig& cfg, const SearchMask* mask = nullptr);

/// Builds a model from the labeled reference inline of a volume.
ClassifiedModel build_model(const SeismicVolume& volume, int reference_inline,
                            const BoundaryRecord& boundary, const TrackerConfig& cfg);

struct SectionResult {
  int inline_no = 0;
  std::optional<TrackedBoundary> boundary;
  std::string error;
  int error_code = 0;
};

/// Nonzero samples of `volume` at one inline, as a search mask.
SearchMask mask_section(const SeismicVolume& volume, int inline_no);

/// Tracks every inline in [first, last] except the reference, each from the
/// reference model. Failures are reported per section. `search_mask`, when
/// given, must share the volume geometry; its nonzero samples mark allowed
/// candidate positions.
std::vector<SectionResult> track_volume(const SeismicVolume& volume, int reference_inline,
                                        const BoundaryRecord& boundary, int first, int last,
                                        const TrackerConfig& cfg, int jobs = 1,
                                        const SeismicVolume* search_mask = nullptr);

}  // namespace salttrack
