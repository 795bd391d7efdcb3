#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "aggorient/dirstats.hpp"
#include "aggorient/geometry.hpp"
#include "aggorient/orientation.hpp"

namespace aggorient {

/// How the contact point of each primary is chosen.
enum class ContactMode {
  Uniform,   // uniform over the primary's pixels
  Directed,  // at a polar angle drawn from a four-fold von Mises model
};

/// Inputs of the ellipse-aggregation generator. Lengths are in units; the
/// raster uses `pixels_per_unit` pixels per unit.
struct SimParams {
  double nu_a_x = 0.0;  // log of the typical semi-major axis of X
  double nu_b_x = 0.0;
  double nu_a_y = 0.0;
  double nu_b_y = 0.0;
  double sigma2 = 0.03 * 0.03;    // variance of the log axis lengths
  double sigma_e2 = 0.1 * 0.1;    // variance of the boundary noise
  double r_x = 2.2;
  double r_y = 2.2;
  GridSpec grid;
  double pixels_per_unit = 10.0;
  std::size_t noise_bins = 64;
  std::size_t n_cases = 50;
  std::size_t n_replicates = 1;
  std::uint64_t seed = 0;

  ContactMode contact = ContactMode::Uniform;
  FourFoldVonMises contact_model;  // Directed mode only
  double contact_radius = 0.7;     // fraction of the boundary radius, Directed mode only

  /// Axis means from aspect ratios: exp(nu_a) = r * exp(nu_b), exp(nu_b) = minor.
  static SimParams with_ratios(double r_x, double r_y, double minor = 5.0);

  void validate() const;
};

/// Ground truth of one generated aggregation.
struct SimTruth {
  RigidTransform t_x;    // maps X onto its axis-aligned ellipse frame
  RigidTransform t_y;
  RigidTransform phi_x;  // places X in the aggregate
  RigidTransform phi_y;
  double a_x = 0.0, b_x = 0.0, a_y = 0.0, b_y = 0.0;  // sampled semi-axes, units
  Vec2 contact_x = Vec2::Zero();  // contact pixel of X in X coordinates
  Vec2 contact_y = Vec2::Zero();
  Vec2 center = Vec2::Zero();  // centroid of the rasterized overlap
  std::size_t overlap = 0;     // number of overlap pixels
  double theta_x = 0.0;        // (-pi, pi]
  double theta_y = 0.0;
};

struct SimCase {
  std::string id;
  std::size_t replicate = 0;
  std::size_t index = 0;
  PointSet x, y, z;
  SimTruth truth;
  std::vector<std::string> warnings;  // resampling notices
};

/// Generates one aggregation.
SimCase simulate_case(const SimParams& p, std::mt19937_64& rng, std::string id = "case");

/// n_replicates x n_cases independent cases; case (r, i) uses its own stream
/// derived from the seed, so the result does not depend on scheduling.
std::vector<SimCase> simulate_batch(const SimParams& p);

/// Axis-aligned, noise-free raster of the ellipse with the given semi-axes,
/// farthest-point subsampled to `max_points` and put in MDS standard position.
PointSet ellipse_reference(double a_units, double b_units, double pixels_per_unit,
                           std::size_t max_points = 200);

/// Category id used by the generator for an aspect ratio, e.g. "ellipse_r2.2".
std::string ellipse_category_id(double r);

/// Squared translation errors (units^2) and 1 - cos angular errors.
struct EstimateErrors {
  double t_x_translation = 0.0;
  double t_x_angle = 0.0;
  double t_y_translation = 0.0;
  double t_y_angle = 0.0;
  double phi_x_translation = 0.0;
  double phi_x_angle = 0.0;
  double phi_y_translation = 0.0;
  double phi_y_angle = 0.0;
  double theta_x = 0.0;
  double theta_y = 0.0;
};

/// Errors of an analysis record against the generator truth. Transform angles
/// are compared modulo pi (the half-turn symmetry of an ellipse); placement
/// transforms also take the matching half-turn translation about the
/// primary's center. Orientation angles are compared after four-fold
/// normalization.
EstimateErrors evaluate_estimates(const SimTruth& truth, const AggregationRecord& est,
                                  double pixels_per_unit = 10.0);

}  // namespace aggorient
