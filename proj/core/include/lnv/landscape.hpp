#pragma once

// Loss-landscape quantities at component samples and the checks built on
// them: constant loss per component, rank-ordered losses, zero-eigenvalue
// counts against dimension, and the residual/plain translation.

#include <cstdint>
#include <string>
#include <vector>

#include "lnv/netsys.hpp"
#include "lnv/nid.hpp"

namespace lnv {

/// Loss polynomial at a complex point, no conjugation.
Complex pseudo_loss(const Polynomial& loss, std::span<const Complex> point);
std::vector<Complex> hessian_spectrum(const Polynomial& loss, std::span<const Complex> point);
/// n - numerical_rank(Hessian, tol).
int zero_eig_count(const Polynomial& loss, std::span<const Complex> point, double tol = 1e-6);
int product_rank(const Architecture& arch, std::span<const Complex> plain_point, double tol = 1e-6);

enum class Classification { global_minimum, saddle_component };
std::string to_string(Classification c);

struct SampleAnalysis {
  CVector point;  // in the problem's coordinates
  Complex loss;
  int zero_eig_count = 0;
  std::vector<Complex> spectrum;
  int product_rank = 0;
};

struct ComponentAnalysis {
  std::string id;
  int dim = 0;
  std::size_t degree = 0;
  std::vector<SampleAnalysis> samples;
  Complex pseudo_loss;           // mean over samples
  double loss_deviation = 0.0;   // max pairwise |loss_i - loss_j|
  int zero_eig_count = 0;        // at the first sample
  int product_rank = 0;          // max over samples
  Membership contains_origin = Membership::indeterminate;
  Classification classification = Classification::saddle_component;
  std::string error;             // nonempty when sampling failed

  bool ok() const { return error.empty(); }
};

/// Quantities at W = 0 (plain coordinates).
struct OriginAnalysis {
  Complex loss;
  int zero_eig_count = 0;
  std::vector<Complex> spectrum;
};

struct LandscapeAnalysis {
  std::vector<ComponentAnalysis> components;  // decomposition order
  OriginAnalysis origin;
  double half_output_energy = 0.0;
};

inline constexpr double kZeroEigTol = 1e-6;
inline constexpr double kGlobalLossTol = 1e-6;

/// Loss, plain Hessian spectrum, zero count and product rank at one point
/// given in the problem's coordinates.
SampleAnalysis analyze_sample(const NetProblem& problem, CVector point);
OriginAnalysis analyze_origin(const NetProblem& problem);
/// Fills the per-component aggregates from its samples.
void summarize(ComponentAnalysis& a, double half_output_energy);

/// Samples each component, evaluates the loss there and the Hessian of the
/// plain loss at the plain-coordinate point, and tests origin membership.
LandscapeAnalysis analyze(const Decomposition& decomp, const NetProblem& problem, int samples_per_component,
                          std::uint64_t seed, const TrackSettings& settings);

/// Copies loss, zero count, origin membership and rank into the components.
void annotate(Decomposition& decomp, const LandscapeAnalysis& analysis);

enum class Verdict { verified, violated, indeterminate };
std::string to_string(Verdict v);

struct Evidence {
  std::string subject;
  std::string check;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct HypothesisReport {
  std::string id;  // H1, H2, H3, C1, C2, RES
  Verdict verdict = Verdict::indeterminate;
  std::vector<Evidence> evidence;
  std::string stage;  // failing stage for indeterminate verdicts
};

/// Constant loss per component (pairwise spread within tol * (1 + |mean|))
/// and equal losses on every component through the origin.
HypothesisReport verify_h2(const LandscapeAnalysis& analysis, double tol = 1e-6);

/// Zero-eigenvalue count equals the dimension at every sample; at the origin
/// it is at least the dimension of each component through it.
HypothesisReport verify_h3(const LandscapeAnalysis& analysis);

struct Stratum {
  int rank_bound = 0;  // components have product rank < rank_bound
  Decomposition decomposition;
  LandscapeAnalysis analysis;
};

/// Decomposes gradient + r x r minors for r = 1..k.
std::vector<Stratum> compute_strata(const NetProblem& problem, const DecomposeOptions& options, int samples,
                                    std::uint64_t seed);

/// Losses ordered by product rank (any point of a lower-rank component is at
/// least any point of a higher-rank one), and the rank-zero stratum equals
/// the components through the origin.
HypothesisReport verify_h1(const NetProblem& problem, const Decomposition& plain, const LandscapeAnalysis& plain_analysis,
                           const std::vector<Stratum>& strata, const TrackSettings& settings, std::uint64_t seed,
                           double tol = 1e-6);

/// Equal (dim, degree) multisets and shifted samples lying on a matching
/// component in both directions. Throws Error unless the two problems are
/// the plain and residual forms of one architecture.
HypothesisReport verify_residual(const NetProblem& plain_problem, const Decomposition& plain,
                                 const NetProblem& residual_problem, const Decomposition& residual, int samples,
                                 const TrackSettings& settings, std::uint64_t seed);

}  // namespace lnv
