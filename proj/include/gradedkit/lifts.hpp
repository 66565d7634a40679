#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradedkit/fields.hpp"

namespace gk {

/// Polynomial family h(t, .) acting on a chart. Images live on the chart
/// extended by the formal parameter.
struct HomAction {
  ChartPtr chart;
  ChartPtr withT;
  std::string param = "t";
  Substitution map;  // chart -> withT

  /// Identity images; set the coordinates that move with map.set.
  static HomAction identity(const ChartPtr& chart, const std::string& param = "t");
  Expr image(const std::string& coord) const { return map.image(coord); }
  Expr t() const { return Expr::var(withT, param); }
};

/// c -> t^{w} c, with w the sum of the selected weight components (all by default).
HomAction canonicalAction(const ChartPtr& chart, const std::vector<std::size_t>& components = {});

/// Residuals of h_1 = id and h_t h_s = h_{ts}.
CheckReport verifyAction(const HomAction& h);
/// Largest power of t; throws when the action does not verify.
int actionDegree(const HomAction& h);

/// Per coordinate (declaration order), the t-coefficients of its image, orders 0..degree.
using TaylorFrame = std::vector<std::pair<std::string, std::vector<Expr>>>;
TaylorFrame taylorFrame(const HomAction& h);

struct Homogenization {
  bool supported = false;
  std::string reason;      // why the action is outside the supported class
  Substitution change;     // old chart -> old chart: the homogeneous coordinates
  Substitution inverse;
  CheckReport report;
};
/// Triangular case: the coefficient of t^{w(c)} in h(c) must be c plus terms
/// in other coordinates, with acyclic dependencies.
Homogenization homogenize(const HomAction& h);

VecField weightVectorField(const ChartPtr& chart, std::size_t component);

// ---------------------------------------------------------------------------
// Chart transformers.

/// Adds a weight component; the copy of c at level i is named prefix^i + c
/// and has weight (w(c), i). k = 0 returns the chart unchanged.
ChartPtr higherTangentChart(const ChartPtr& chart, int k, const std::string& prefix = "d");
ChartPtr tangentChart(const ChartPtr& chart, const std::string& prefix = "d");
/// Name of the level-i copy of a coordinate.
std::string liftedName(const std::string& name, int level, const std::string& prefix = "d");

/// Phase lift: momentum "p_c" of weight (bound - w(c), 1). With shifted = true
/// momenta have reversed parity and the bracket is odd.
ChartPtr cotangentChart(const ChartPtr& chart, bool shifted = false, const std::string& prefix = "p_");
std::string momentumName(const std::string& coord, const std::string& prefix = "p_");

/// Flips the parity of coordinates whose weight in `component` is 1.
ChartPtr parityReverse(const ChartPtr& chart, std::size_t component);
/// Sums the listed components into the position of the smallest one.
ChartPtr collapseWeights(const ChartPtr& chart, std::vector<std::size_t> components);
/// New component i is old component perm[i].
ChartPtr reorderWeights(const ChartPtr& chart, const std::vector<std::size_t>& perm);

struct Truncation {
  ChartPtr chart;
  Substitution projection;  // truncated -> full: pullback of functions
};
Truncation truncateChart(const ChartPtr& chart, int level);

// ---------------------------------------------------------------------------
// Lifts of maps, fields and bivectors.

/// f^{(i)}: coefficient of e^i in f(sum_j e^j c^{(j)}), as a function on the
/// k-th tangent chart. Parameters are not lifted.
Expr higherLift(const Expr& f, const ChartPtr& lifted, int level, int k, const std::string& prefix = "d");
/// T^k of a substitution: images of every lifted coordinate.
Substitution liftSubstitution(const Substitution& s, int k, const ChartPtr& liftedFrom, const ChartPtr& liftedTo,
                              const std::string& prefix = "d");
/// Complete lift sum_i (X^c)^{(i)} d/dc^{(i)}.
VecField higherLiftField(const VecField& x, const ChartPtr& lifted, int k, const std::string& prefix = "d");
/// Lift of a homogeneity action to T^k, with the new component left untouched.
HomAction liftAction(const HomAction& h, const ChartPtr& lifted, int k, const std::string& prefix = "d");

/// d_T^k of a multivector written with odd momenta on a shifted cotangent
/// chart; the result lives on the shifted cotangent of the k-th tangent chart.
Expr tangentLiftPoisson(const Expr& p, int k);

/// Weight of a homogeneous function on a cotangent-type chart when each
/// momentum counts as minus its conjugate's weight (first arity-1 components).
std::optional<Shift> naturalShift(const Expr& e);
/// Number of momentum factors in every term, when uniform.
std::optional<int> momentumDegree(const Expr& e);

}  // namespace gk
