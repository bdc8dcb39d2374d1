#pragma once

#include <array>
#include <functional>
#include <vector>

namespace divhjb {

using State2 = std::array<double, 2>;

struct IvpConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.05;
    double dense_spacing = 0.01;  ///< spacing of the uniform output grid
};

enum class IvpTermination {
    Completed,     ///< reached x_end
    GuardStop,     ///< guard predicate fired
    SingularStop,  ///< step size underflowed (derivative blow-up)
    Diverged       ///< non-finite state or right-hand side
};

const char* to_string(IvpTermination t);

struct DensePath {
    std::vector<double> xs;      ///< uniform grid, xs[i] = x0 + i * dense_spacing
    std::vector<State2> states;  ///< states[i] at xs[i]
    IvpTermination reason = IvpTermination::Completed;
    double stop_x = 0.0;  ///< where the integration actually ended
};

using OdeRhs = std::function<State2(double, const State2&)>;
using OdeGuard = std::function<bool(double, const State2&)>;

/// Adaptive Dormand-Prince 5(4) embedded pair with proportional step control
/// and cubic Hermite dense output on a uniform grid.
///
/// The optional guard is evaluated after every accepted step; when it fires,
/// integration stops with reason GuardStop at that step's endpoint. Dense
/// output always covers [x0, stop_x].
DensePath integrate_ivp(const OdeRhs& rhs, double x0, State2 y0, double x_end,
                        const IvpConfig& cfg, const OdeGuard& guard = {});

}  // namespace divhjb
