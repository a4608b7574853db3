#pragma once

// Homotopy continuation: start systems, predictor-corrector path tracking,
// Newton refinement and whole-system solving.
//
// Paths run t: 1 -> 0 on H(w, t) = gamma t G(w) + (1 - t) F(w) with a
// fourth-order Runge-Kutta predictor on dw/dt = -H_w^{-1} H_t and a Newton
// corrector; the step halves on corrector failure and doubles after a run of
// successes. By default the homotopy is homogenized and tracked on a random
// affine chart of projective space, so paths that pass near infinity stay
// well scaled; endpoints are mapped back to affine coordinates.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lnv/linalg.hpp"
#include "lnv/poly.hpp"

namespace lnv {

class NonSquareSystem : public Error {
 public:
  using Error::Error;
};
class SingularJacobian : public Error {
 public:
  using Error::Error;
};

struct TrackSettings {
  double step_init = 0.02;
  double step_min = 1e-13;
  double step_max = 0.1;
  double corrector_tol = 1e-8;
  double final_tol = 1e-11;
  double divergence_bound = 1e8;
  int max_steps = 20000;
  int max_corrector_iterations = 3;
  /// Below this t the tracker watches the Jacobian condition for singular endpoints.
  double end_zone = 0.05;
  double singular_condition = 1e12;
  /// Track the homogenized homotopy on a random chart.
  bool projective = true;

  /// Throws Error on inconsistent values.
  void validate() const;
  /// Smaller steps for a retry of a failed path.
  TrackSettings tightened() const;
};

enum class PathStatus { converged, diverged, step_failure, ill_conditioned };

std::string to_string(PathStatus s);

struct PathResult {
  CVector endpoint;
  PathStatus status = PathStatus::step_failure;
  double condition_estimate = 0.0;
  int winding_hint = 1;
  int steps = 0;
  double final_t = 1.0;
  /// scaled_residual of the target at the endpoint.
  double residual = 0.0;
  /// Affine points at end-zone t values one decade apart, newest last.
  std::vector<std::pair<double, CVector>> approach;
};

/// True if the path ends at p: within match_tol, or for a singular stop,
/// closing in on p like a positive power of t over its last end-zone decade.
bool path_reaches(const PathResult& r, std::span<const Complex> p, double match_tol);

/// Evaluation works in tracking coordinates: the affine variables, or with
/// projective = true the variables followed by the homogenizing one, and an
/// extra chart equation c . x = 1.
class Homotopy {
 public:
  Homotopy(PolySystem start, PolySystem target, Complex gamma, bool projective = true);

  const PolySystem& start() const { return start_; }
  const PolySystem& target() const { return target_; }
  Complex gamma() const { return gamma_; }
  bool projective() const { return projective_; }
  std::size_t nvars() const { return target_.nvars(); }
  std::size_t tracking_dim() const { return projective_ ? nvars() + 1 : nvars(); }

  /// Affine point to tracking coordinates.
  CVector lift(std::span<const Complex> w) const;
  /// Tracking coordinates to an affine point; non-finite at infinity.
  CVector drop(std::span<const Complex> x) const;
  /// max |w_i| of the affine image, without forming it.
  double affine_norm(std::span<const Complex> x) const;

  /// H, dH/dx and dH/dt at (x, t) in tracking coordinates.
  void evaluate(std::span<const Complex> x, double t, CVector& h, CMatrix& hw, CVector& ht) const;
  /// ||H_x^{-1}||_inf * || |H_x| ||_inf with |H_x| the cancellation-free
  /// magnitude of the Jacobian; infinite when H_x is singular.
  double condition_estimate(std::span<const Complex> x, double t) const;

 private:
  PolySystem start_;
  PolySystem target_;
  Complex gamma_;
  bool projective_;
  PolySystem hstart_;
  PolySystem htarget_;
  CVector chart_;
};

PathResult track_path(std::span<const Complex> start_solution, const Homotopy& h, const TrackSettings& s);

struct StartSystem {
  PolySystem system;
  std::vector<CVector> solutions;
};

/// {w_i^{deg f_i} - 1}; solutions are all tuples of roots of unity.
StartSystem start_total_degree(const PolySystem& target);

std::vector<std::vector<int>> multidegrees(const PolySystem& sys, const std::vector<std::vector<std::size_t>>& groups);
std::uint64_t total_degree_count(const std::vector<int>& degrees);
/// Number of solutions of the linear-product start system for the given
/// multidegrees and group sizes.
std::uint64_t multihom_count(const std::vector<std::vector<int>>& multidegree, const std::vector<std::size_t>& group_sizes);

/// Linear-product start system: equation i is a product, over groups j, of
/// multidegree[i][j] random affine forms in the group-j variables.
StartSystem start_multihom(const PolySystem& target, const std::vector<std::vector<std::size_t>>& groups,
                           std::uint64_t seed);

enum class StartStrategy { total, multihom, automatic };

std::string to_string(StartStrategy s);
StartStrategy parse_start_strategy(const std::string& s);

/// automatic picks multihom when nvars * max degree exceeds this and groups
/// are available.
inline constexpr int kMultihomThreshold = 30;

struct SolveOptions {
  TrackSettings settings;
  StartStrategy strategy = StartStrategy::automatic;
  std::vector<std::vector<std::size_t>> groups;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// A distinct endpoint with the paths that reached it.
struct Solution {
  CVector point;
  bool singular = false;
  int multiplicity = 1;
  double condition_estimate = 0.0;
  double residual = 0.0;
  std::vector<std::size_t> paths;
};

struct SolveResult {
  std::vector<PathResult> paths;
  std::vector<Solution> solutions;  // ordered by first path index
  StartStrategy strategy_used = StartStrategy::total;
  std::size_t converged = 0;
  std::size_t diverged = 0;
  std::size_t failed = 0;
  std::size_t singular = 0;
};

SolveResult solve_system(const PolySystem& target, const SolveOptions& options);

/// Newton's method on a square system. Stops when the update is below
/// tol * (1 + ||p||). Throws NoConvergence / SingularJacobian.
CVector newton_refine(std::span<const Complex> p, const PolySystem& sys, double tol, int max_iter);

/// Gauss-Newton with a rank-truncated pseudo-inverse, usable at singular or
/// non-isolated zeros and on non-square systems. Returns the best iterate
/// found, or nullopt if the residual never dropped below `accept`.
std::optional<CVector> singular_refine(std::span<const Complex> p, const PolySystem& sys, double accept,
                                       int max_iter = 40);

/// Coordinate-wise comparison: max_i |a_i - b_i| <= tol * max(1, |a|_inf, |b|_inf).
bool same_point(std::span<const Complex> a, std::span<const Complex> b, double tol);

/// Runs fn(i) for i in [0, count) on up to `threads` worker threads.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace lnv
