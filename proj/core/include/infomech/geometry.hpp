#ifndef INFOMECH_GEOMETRY_HPP
#define INFOMECH_GEOMETRY_HPP

#include <vector>

#include "infomech/context.hpp"

namespace infomech {

struct PosteriorSet {
  enum class Provenance { QStar, Grid, Union };
  std::vector<Posterior> points;  // normalized, deduplicated, sorted
  Provenance provenance = Provenance::QStar;
};

// One action-pair indifference set of a type, in the outside observer frame:
// normal = (u(theta,.,a) - u(theta,.,a'))^t D_theta. Zero normals dropped.
struct IndifferenceHyperplane {
  int theta = 0;
  int action_a = 0;
  int action_b = 0;
  std::vector<double> normal;
};

enum class GeometryFrame { Independent, Correlated };

std::vector<IndifferenceHyperplane> indifference_hyperplanes(
    const Context& ctx, GeometryFrame frame);

struct GeometryOptions {
  // Cap on the number of (m-1)-subsets of constraints enumerated.
  long long candidate_cap = 2'000'000;
  double dedup_tol = 1e-9;
};

// All vertices of the polyhedral complex obtained by slicing the simplex of
// the mu-support coordinates with every indifference hyperplane; always
// contains the simplex corners and the prior. Throws ComplexityLimit beyond
// the candidate cap. Frame::Independent uses the raw value functions,
// Frame::Correlated the D_theta-translated ones; for independent mu the two
// agree.
PosteriorSet interesting_posteriors(const Context& ctx,
                                    GeometryFrame frame,
                                    const GeometryOptions& opts = {});

// Picks the frame from is_independent(ctx).
PosteriorSet interesting_posteriors(const Context& ctx,
                                    const GeometryOptions& opts = {});

// Union of `base` with every lattice point of denominator K on the support
// simplex. Size-guarded; the guard corresponds to K <= 200 for m = 2 and
// K <= 40 for m = 3.
PosteriorSet grid_refinement(const Context& ctx, const PosteriorSet& base,
                             int resolution, const GeometryOptions& opts = {});

struct PriorDecomposition {
  double gamma = 0.0;  // p = gamma * q + (1 - gamma) * r
  Posterior r;         // boundary point on the ray from q through p
};

// Writes the prior as a convex combination of q and a boundary point r on
// the far side of p (maximal step). q == p yields gamma = 0, r = p.
// Throws DegeneratePrior when p vanishes on a support coordinate.
PriorDecomposition decompose_through_prior(const Posterior& p,
                                           const Posterior& q);

}  // namespace infomech

#endif  // INFOMECH_GEOMETRY_HPP
