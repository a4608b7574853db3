#pragma once

// Witness sets by per-dimension slicing.
//
// For each candidate dimension d the system is randomized down to n - d
// equations and cut with d random affine hyperplanes. Isolated solutions of
// that square system are witness points of the dimension-d components, plus
// junk lying on higher-dimensional components, which membership tests
// against the already computed higher witness sets remove.

#include <cstdint>
#include <map>
#include <vector>

#include "lnv/linalg.hpp"
#include "lnv/poly.hpp"
#include "lnv/tracker.hpp"

namespace lnv {

/// codim affine forms a_i . w + c_i.
struct SliceSystem {
  CMatrix coefficients;  // codim x n
  CVector constants;

  std::size_t codim() const { return coefficients.rows(); }
  std::size_t nvars() const { return coefficients.cols(); }

  std::vector<Polynomial> polys() const;
  CVector evaluate(std::span<const Complex> point) const;

  /// Gaussian complex coefficients from the (seed, stream) substream.
  static SliceSystem random(std::size_t codim, std::size_t nvars, std::uint64_t seed);
  /// Random normals, constants chosen so the slice contains `point`.
  static SliceSystem random_through(std::span<const Complex> point, std::size_t codim, std::uint64_t seed);
  /// Same normals, shifted so the slice contains `point`.
  SliceSystem parallel_through(std::span<const Complex> point) const;
};

struct RandomizedSystem {
  PolySystem system;
  CMatrix matrix;  // target_count x N, columns in the input equation order
};

/// target_count random combinations of the N input equations, in the form
/// [I | Lambda] * D * P * F with P sorting equations by degree (highest
/// first) and D a random unit diagonal. Row i then has the degree of the
/// i-th highest input equation, which keeps the Bezout count minimal.
RandomizedSystem randomize(const PolySystem& sys, std::size_t target_count, std::uint64_t seed);

/// Witness data for one dimension: the system S, its randomization, the
/// slice L and the points of S cut by L.
struct WitnessSet {
  int dim = 0;
  PolySystem system;
  RandomizedSystem randomized;
  SliceSystem slice;
  std::vector<CVector> points;

  std::size_t degree() const { return points.size(); }
  /// Randomized equations followed by the slice forms (square).
  PolySystem sliced() const;
  PolySystem sliced_with(const SliceSystem& other) const;
  /// Same system and slice restricted to a subset of the points.
  WitnessSet restricted(std::span<const std::size_t> indices) const;
};

struct SupersetDiagnostics {
  std::size_t paths = 0;
  std::size_t converged = 0;
  std::size_t diverged = 0;
  std::size_t failed = 0;
  std::size_t singular = 0;
  /// Endpoints solving the randomized system but not the original one.
  std::size_t spurious = 0;
  StartStrategy strategy = StartStrategy::total;
};

struct WitnessSuperset {
  int dim = 0;
  PolySystem system;
  RandomizedSystem randomized;
  SliceSystem slice;
  std::vector<CVector> regular;   // nonsingular endpoints
  std::vector<CVector> singular;  // refined singular endpoints
  SupersetDiagnostics diagnostics;
};

/// Options shared by the slicing, filtering and monodromy stages.
struct WitnessOptions {
  TrackSettings settings;
  StartStrategy strategy = StartStrategy::automatic;
  std::vector<std::vector<std::size_t>> groups;
  unsigned threads = 1;
};

/// Scaled residual a singular endpoint must reach on the original system
/// plus slice to count as a candidate.
inline constexpr double kSingularAccept = 1e-9;
/// Coordinate-wise relative tolerance for identifying points.
inline constexpr double kMatchTol = 1e-6;

WitnessSuperset witness_superset(const PolySystem& sys, int dim, const WitnessOptions& options, std::uint64_t seed);

enum class Membership { member, not_member, indeterminate };

std::string to_string(Membership m);

inline constexpr std::uint64_t kMembershipAttempts = 3;

/// Tracks the points of `ws` to a generic slice through p and reports whether
/// p is among the endpoints. Stops at the first match; a failed path leads to
/// a fresh slice, up to kMembershipAttempts times.
Membership contains_point(const WitnessSet& ws, std::span<const Complex> point, const TrackSettings& settings,
                          std::uint64_t seed);

struct JunkFilterResult {
  std::vector<CVector> points;       // regular survivors: the witness points
  std::vector<CVector> quarantined;  // singular survivors, possibly on non-reduced components
  std::size_t junk = 0;
  std::size_t indeterminate = 0;
};

/// Drops every candidate lying on a component of a higher-dimensional set.
JunkFilterResult junk_filter(const WitnessSuperset& candidates, const std::vector<const WitnessSet*>& higher,
                             const WitnessOptions& options, std::uint64_t seed);

struct DimensionWitness {
  WitnessSet witness;
  SupersetDiagnostics diagnostics;
  std::vector<CVector> quarantined;
  std::size_t junk = 0;
  std::size_t junk_indeterminate = 0;
};

/// Witness sets for every dimension in [min_dim, max_dim], processed from
/// the top down. Empty dimensions are kept with no points.
std::map<int, DimensionWitness> compute_all_dims(const PolySystem& sys, int min_dim, int max_dim,
                                                 const WitnessOptions& options, std::uint64_t seed);

/// Follows points of `ws` from its slice to `to` with a gamma homotopy.
/// Singular endpoints are refined in place when possible.
std::vector<PathResult> move_slice(const WitnessSet& ws, std::span<const CVector> points, const SliceSystem& to,
                                   Complex gamma, const TrackSettings& settings, unsigned threads);

}  // namespace lnv
