#ifndef DIVPRUNE_DIVERSITY_HPP
#define DIVPRUNE_DIVERSITY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "divprune/learners.hpp"

namespace divprune {

struct RiskParams {
    double delta = 1.0;           // bound on ||phi(x)||
    double epsilon = 0.01;        // training-label noise rate, in [0, 1/2)
    std::uint64_t sample_size = 200;  // |S|
    double confidence = 0.05;     // xi in (0, 1]

    void validate() const;  // throws std::invalid_argument
};

struct DiversityProfile {
    std::vector<double> per_instance_div;
    std::vector<int> per_instance_lambda;      // -1, 0, +1
    std::vector<double> per_instance_bar_margin;
    std::size_t tie_count = 0;                 // instances with vote == 0
    double g_bar = 0.0;  // expected ensemble 0/1 error
    double a_bar = 0.0;  // weighted-average member error
    double d_bar = 0.0;  // expected diversity; g_bar == a_bar - d_bar
};

struct GammaResult {
    double gamma = 0.0;
    std::size_t argmin_index = 0;
    double div_at_argmin = 0.0;
    int lambda_at_argmin = 0;
};

struct CriticalPoints {
    double q1 = 0, q2 = 0, q3 = 0, q4 = 0, q5 = 0, q6 = 0;
    bool implied_condition_ok = false;
};

enum class Trend { increasing, decreasing };

// Curvature labels follow the bulge-direction convention used in the interval
// table ("convex" = bulging upward). The *_slope_growing flags carry the plain
// sign of the next derivative on the interval, so numeric checks should use
// those rather than the labels.
struct IntervalClass {
    std::string name;            // e.g. "(q1,q6)"
    Trend risk_trend;            // sign of R'
    std::string risk_shape;      // "convex" / "concave" label
    Trend d1_trend;              // sign of R''
    std::string d1_shape;
    bool risk_slope_growing;     // R'' > 0 on the interval
    bool d1_slope_growing;       // R''' > 0 on the interval
    bool diversity_helps;        // the two flagged ranges (-q5,-q6), (-q6,-q1)
};

struct SweepRow {
    double div = 0.0;
    int lambda = 0;
    bool evaluable = false;
    double risk = 0.0;
    double risk_d1 = 0.0;
    double risk_d2 = 0.0;
    std::string interval;  // interval name, "n/a" outside the table domain, "singular"
};

// margin(f, x) = f(x) * y
int margin_individual(int prediction, int label);

// 0/1 error of a margin value: -1 -> 1, 0 -> 0.5, +1 -> 0.
double err01(int margin_value);

// Weighted mean member margin at one instance, in [-1, 1].
double bar_margin(const PredictionMatrix& pm, std::span<const double> weights,
                  std::size_t instance);

// Per-instance diversity: half the gap between the ensemble margin and the
// mean member margin.
double div_instance(const PredictionMatrix& pm, std::span<const double> weights,
                    std::size_t instance);

// Sign indicator linking div to the mean margin: bar_margin == lambda - 2*div.
// At div == 0 a nonzero vote marks unanimity and lambda is the ensemble
// margin; a tie vote gives 0.
int lambda_of(double div_value, int vote, int label);

// Full decomposition; asserts |G - (A - D)| <= 1e-9 and throws
// InternalConsistencyError beyond that.
DiversityProfile decompose(const PredictionMatrix& pm, std::span<const double> weights);

// Minimum noise-adjusted margin over non-tie instances with its argmin.
// Throws std::domain_error when every instance is a tie.
GammaResult gamma_margin(const PredictionMatrix& pm, std::span<const double> weights,
                         const RiskParams& params);

// ceil((8*delta/gamma)^2); requires gamma > 0.
std::uint64_t kappa_of(double gamma, double delta);

// Full generalization bound; requires gamma > sqrt(32*delta^2/|S|).
double risk_bound(double gamma, const RiskParams& params);

// Dominant bound term with continuous (non-ceiled) kappa, as a smooth
// function of div at the margin-minimizing instance. lambda must be +/-1.
double estimated_risk(double div_star, int lambda, const RiskParams& params);
double risk_first_derivative(double div_star, int lambda, const RiskParams& params);
double risk_second_derivative(double div_star, int lambda, const RiskParams& params);

CriticalPoints critical_points(const RiskParams& params);

// Locates div_star in one of the eight monotone intervals over
// (-q3,-q1) u (q1,q3). Out-of-domain values raise std::domain_error naming
// the gap. Boundary points fall into the interval to their left.
IntervalClass classify_interval(double div_star, const CriticalPoints& cp);

std::vector<SweepRow> sweep_curve(const RiskParams& params, std::span<const double> grid);

// CSV with header div,lambda,risk,risk_d1,risk_d2,interval (6-decimal fixed).
std::string sweep_csv(const std::vector<SweepRow>& rows);

std::string critical_points_json(const CriticalPoints& cp);

}  // namespace divprune

#endif
