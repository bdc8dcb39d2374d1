#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "divhjb/model.hpp"
#include "divhjb/ode.hpp"

namespace divhjb {

enum class SolutionClass {
    Decaying,     ///< v_x decreases toward 0: the economically meaningful branch
    Bubble,       ///< v and v_x diverge: discounted dividends vanish
    SingularStop  ///< integration hit the singular locus c*(x) = mu
};

const char* to_string(SolutionClass c);

/// Raised where the ODE's leading coefficient mu - c*(vx) vanishes.
class SingularLocusError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when a solution's tail is neither increasing nor decreasing.
class ClassificationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Dense solution of the value-function ODE plus derived quantities.
struct HjbSolution {
    std::vector<double> xs;   ///< uniform grid
    std::vector<double> vs;   ///< v(x), strictly increasing
    std::vector<double> vxs;  ///< v_x(x), positive
    std::vector<double> cs;   ///< c*(x) = optimal_rate_from_slope(vxs)
    SolutionClass classification = SolutionClass::Decaying;
    double stop_x = 0.0;  ///< end of the integrated range
    ModelParams params;
    UtilitySpec utility;
    double b = 0.0;  ///< initial slope v_x(0) used

    /// Nearest grid index for x; throws std::domain_error outside the grid.
    std::size_t index_of(double x) const;
    double value_at(double x) const;  ///< linear interpolation between grid points
    double slope_at(double x) const;
    double rate_at(double x) const;
};

/// v_xx from the unified second-order rearrangement
///   (mu - c*) v_xx + (xi mu - beta - lambda) v_x - xi beta v
///                  + xi (U(c*) - c* v_x) = 0,   c* = optimal_rate_from_slope(vx).
/// Substituting c* reproduces the power-utility and log-utility second-order
/// forms exactly (verified in the unit tests).
/// Throws SingularLocusError when |mu - c*| < 1e-12.
double curvature_rhs(const ModelParams& p, const UtilitySpec& u, double v, double vx);

/// v(0) implied by the free initial slope b = v_x(0):
///   v(0) = [mu b + U(c0) - c0 b] / (beta + lambda),  c0 = optimal_rate_from_slope(b).
/// For log utility with b > 1 the rate clamps to 0 and the identity reduces to
/// v(0) = mu b / (beta + lambda).
double boundary_v0(const ModelParams& p, const UtilitySpec& u, double b);

/// Integrates (v, v_x)' = (v_x, curvature_rhs) from (boundary_v0(b), b) over
/// [0, x_max] and classifies the result. A bubble guard aborts integration
/// once v_x exceeds 100 * b. Throws std::invalid_argument if the start slope
/// sits on the singular locus.
HjbSolution solve_value_function(const ModelParams& p, const UtilitySpec& u, double b,
                                 double x_max, const IvpConfig& cfg = {});

/// Tail classification: Bubble iff vxs increases over the final quarter of the
/// grid or ends above its start; Decaying iff it decreases over the final
/// quarter and ends below its start. A guard stop maps to Bubble, a singular
/// stop passes through. Throws ClassificationError if the tail is neither
/// monotone (needs >= 10 points).
SolutionClass classify_solution(std::span<const double> vxs, IvpTermination reason);

/// Residual of the full integro-differential dynamic-programming equation
///   (mu - c*) v_x - (beta + lambda) v + U(c*) + lambda * int_0^x v(x-y) xi e^{-xi y} dy
/// at a grid point, with the convolution evaluated by the trapezoid rule on
/// the dense grid. Near zero for valid solutions.
double hjb_residual(const HjbSolution& sol, double x);

/// Residual of the first-order form obtained by the substitution y(v) = v_x,
/// with y_v estimated by centered differences on the (vs, vxs) pairs
/// (one-sided at the ends; *one_sided flags that). Near zero for valid
/// solutions, bubbles included.
double riccati_residual(const HjbSolution& sol, std::size_t index, bool* one_sided = nullptr);

}  // namespace divhjb
