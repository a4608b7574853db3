#pragma once

// Numerical irreducible decomposition: monodromy grouping of witness points,
// trace-test certification, membership tests and sampling of components.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lnv/witness.hpp"

namespace lnv {

/// Values filled in by the landscape analysis.
struct ComponentAnnotations {
  std::optional<Complex> pseudo_loss;
  std::optional<int> zero_eig_count;
  std::optional<bool> contains_origin;
  std::optional<int> product_rank;
};

struct IrreducibleComponent {
  std::string id;
  int dim = 0;
  WitnessSet witness;                       // restricted to this component
  std::vector<std::size_t> witness_indices;  // into the dimension's witness set
  bool certified = false;                   // trace test passed
  ComponentAnnotations annotations;

  std::size_t degree() const { return witness.points.size(); }
};

/// Positions of a witness point on the slices translated by 0, +s and -s
/// along the first slice form.
struct TraceSamples {
  CVector at_zero;
  CVector at_plus;
  CVector at_minus;
  bool valid = false;
};

/// Tolerance on the second difference of a group's trace, relative to its
/// first differences.
inline constexpr double kTraceTol = 1e-6;

class TraceOracle {
 public:
  TraceOracle(const WitnessSet& ws, const TrackSettings& settings, std::uint64_t seed, unsigned threads = 1);

  /// Samples for points appended to the witness set after construction.
  void extend(std::span<const CVector> points);
  const TraceSamples& samples(std::size_t i) const { return samples_.at(i); }
  std::size_t size() const { return samples_.size(); }

  /// Second difference of the summed group trace; linear traces give zero.
  std::optional<CVector> deviation(std::span<const std::size_t> group) const;
  bool linear(std::span<const std::size_t> group) const;

 private:
  SliceSystem plus_;
  SliceSystem minus_;
  const WitnessSet* ws_;
  TrackSettings settings_;
  unsigned threads_;
  std::vector<TraceSamples> samples_;
};

/// True iff the summed trace of the group moves linearly under parallel
/// translation of the slice.
bool trace_test(std::span<const std::size_t> group, const WitnessSet& ws, const TrackSettings& settings,
                std::uint64_t seed);

struct BreakupResult {
  std::vector<CVector> points;  // input points followed by any found during loops
  std::vector<std::vector<std::size_t>> groups;
  std::vector<bool> certified;
  int loops = 0;
  bool complete = false;  // every group certified
};

/// Partitions the witness points by tracking them around random slice loops
/// L -> L' -> L'' -> L and merging orbits until every group passes the trace
/// test or max_loops is spent.
BreakupResult monodromy_breakup(const WitnessSet& ws, int max_loops, std::uint64_t seed, const TrackSettings& settings,
                                unsigned threads = 1);

Membership membership_test(std::span<const Complex> point, const IrreducibleComponent& comp,
                           const TrackSettings& settings, std::uint64_t seed);

/// A generic point of the component: one witness point tracked to a fresh
/// random slice. Throws Error after kSampleAttempts failed slices.
inline constexpr int kSampleAttempts = 6;
CVector sample_point(const IrreducibleComponent& comp, std::uint64_t seed, const TrackSettings& settings);

struct DecomposeOptions {
  WitnessOptions witness;
  int min_dim = 0;
  int max_dim = -1;  // negative: n - 1
  int max_loops = 20;
  std::uint64_t seed = 1;
};

struct DimensionReport {
  int dim = 0;
  std::size_t witness_points = 0;
  /// Slice, randomization and points; components index into `witness.points`.
  WitnessSet witness;
  SupersetDiagnostics superset;
  std::size_t junk = 0;
  std::size_t junk_indeterminate = 0;
  std::vector<CVector> quarantined;
  int loops = 0;
  bool complete = true;
  std::string error;
};

struct Decomposition {
  PolySystem system;
  std::vector<IrreducibleComponent> components;  // sorted by dim desc, degree, id
  std::vector<DimensionReport> dimensions;       // descending dim
  DecomposeOptions options;
  bool provisional = false;
  double seconds = 0.0;

  const IrreducibleComponent* find(const std::string& id) const;
};

Decomposition decompose(const PolySystem& sys, const DecomposeOptions& options);

/// Stable label from dimension, degree and a hash of the witness trace.
std::string component_id(int dim, std::span<const CVector> points);

/// Canonical order: dim descending, degree ascending, id.
void sort_components(std::vector<IrreducibleComponent>& comps);

}  // namespace lnv
