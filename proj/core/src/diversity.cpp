#include "divprune/diversity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "divprune/errors.hpp"

#include <nlohmann/json.hpp>

namespace divprune {

namespace {

constexpr double kLn2 = 0.6931471805599453;

std::vector<std::int8_t> column(const PredictionMatrix& pm, std::size_t instance) {
    std::vector<std::int8_t> out(pm.n_classifiers);
    for (std::size_t j = 0; j < pm.n_classifiers; ++j) out[j] = pm.at(j, instance);
    return out;
}

double instance_sum(const PredictionMatrix& pm, std::span<const double> weights,
                    std::size_t instance) {
    const auto preds = column(pm, instance);
    return weighted_prediction_sum(preds, weights);
}

// Accumulation of k weights can overshoot 1 by a few ulps at unanimous
// instances, which would push div across the 0 boundary and flip lambda.
// The mean margin lives in [-1, 1] by definition, so clamp it there.
double clamped_bar(int label, double sum) {
    return std::clamp(label * sum, -1.0, 1.0);
}

void check_lambda(int lambda) {
    if (lambda != 1 && lambda != -1)
        throw std::invalid_argument("lambda must be +1 or -1, got " + std::to_string(lambda));
}

double margin_term(double div_star, int lambda) {
    const double m = lambda - 2.0 * div_star;
    if (m == 0.0)
        throw std::domain_error("zero ensemble margin: lambda - 2*div == 0 is singular");
    return m;
}

}  // namespace

void RiskParams::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (!(epsilon >= 0.0 && epsilon < 0.5))
        throw std::invalid_argument("epsilon must lie in [0, 0.5)");
    if (sample_size < 1) throw std::invalid_argument("sample_size must be >= 1");
    if (!(confidence > 0.0 && confidence <= 1.0))
        throw std::invalid_argument("confidence must lie in (0, 1]");
}

int margin_individual(int prediction, int label) {
    if ((prediction != 1 && prediction != -1) || (label != 1 && label != -1))
        throw std::invalid_argument("margin_individual expects values in {-1,+1}");
    return prediction * label;
}

double err01(int margin_value) {
    switch (margin_value) {
        case -1: return 1.0;
        case 0: return 0.5;
        case 1: return 0.0;
        default:
            throw std::invalid_argument("err01 expects a margin in {-1,0,+1}, got " +
                                        std::to_string(margin_value));
    }
}

double bar_margin(const PredictionMatrix& pm, std::span<const double> weights,
                  std::size_t instance) {
    return clamped_bar(pm.labels[instance], instance_sum(pm, weights, instance));
}

double div_instance(const PredictionMatrix& pm, std::span<const double> weights,
                    std::size_t instance) {
    const double sum = instance_sum(pm, weights, instance);
    const int ens_margin = vote_from_sum(sum) * pm.labels[instance];
    return 0.5 * ens_margin - 0.5 * clamped_bar(pm.labels[instance], sum);
}

int lambda_of(double div_value, int vote, int label) {
    if (div_value > 0.0) return 1;
    if (div_value < 0.0) return -1;
    if (vote == 0) return 0;
    return vote * label;  // unanimity: lambda equals the ensemble margin
}

DiversityProfile decompose(const PredictionMatrix& pm, std::span<const double> weights) {
    const std::size_t n = pm.n_instances;
    const std::size_t k = pm.n_classifiers;
    if (n == 0) throw DataError("decompose needs at least one instance");

    DiversityProfile p;
    p.per_instance_div.resize(n);
    p.per_instance_lambda.resize(n);
    p.per_instance_bar_margin.resize(n);

    double g_sum = 0.0, d_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sum = instance_sum(pm, weights, i);
        const int vote = vote_from_sum(sum);
        const double bar = clamped_bar(pm.labels[i], sum);
        const int ens_margin = vote * pm.labels[i];
        const double div = 0.5 * ens_margin - 0.5 * bar;
        p.per_instance_div[i] = div;
        p.per_instance_bar_margin[i] = bar;
        p.per_instance_lambda[i] = lambda_of(div, vote, pm.labels[i]);
        if (vote == 0) ++p.tie_count;
        g_sum += err01(ens_margin);
        d_sum += div;
    }
    p.g_bar = g_sum / static_cast<double>(n);
    p.d_bar = d_sum / static_cast<double>(n);

    double a_bar = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double member_err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            member_err += err01(margin_individual(pm.at(j, i), pm.labels[i]));
        a_bar += weights[j] * (member_err / static_cast<double>(n));
    }
    p.a_bar = a_bar;

    const double residual = std::fabs(p.g_bar - (p.a_bar - p.d_bar));
    if (residual > 1e-9) {
        std::ostringstream msg;
        msg << "error decomposition identity violated: |G - (A - D)| = " << residual;
        throw InternalConsistencyError(msg.str());
    }
    return p;
}

GammaResult gamma_margin(const PredictionMatrix& pm, std::span<const double> weights,
                         const RiskParams& params) {
    params.validate();
    const std::size_t n = pm.n_instances;
    if (n == 0) throw DataError("gamma_margin needs at least one instance");

    const double scale = 1.0 - 2.0 * params.epsilon;
    bool found = false;
    GammaResult best;
    for (std::size_t i = 0; i < n; ++i) {
        const double sum = instance_sum(pm, weights, i);
        const int vote = vote_from_sum(sum);
        if (vote == 0) continue;  // tie instances are outside the margin analysis
        const double bar = clamped_bar(pm.labels[i], sum);
        const int ens_margin = vote * pm.labels[i];
        const double div = 0.5 * ens_margin - 0.5 * bar;
        const int lambda = lambda_of(div, vote, pm.labels[i]);
        const double value = scale * (lambda - 2.0 * div);
        if (!found || value < best.gamma) {
            found = true;
            best.gamma = value;
            best.argmin_index = i;
            best.div_at_argmin = div;
            best.lambda_at_argmin = lambda;
        }
    }
    if (!found)
        throw std::domain_error("every instance is a voting tie; ensemble margin undefined");
    return best;
}

std::uint64_t kappa_of(double gamma, double delta) {
    if (!(gamma > 0.0))
        throw std::domain_error("kappa requires a positive margin, got gamma = " +
                                std::to_string(gamma));
    const double value = std::ceil((8.0 * delta / gamma) * (8.0 * delta / gamma));
    if (!(value < 9.22e18))
        throw std::domain_error("kappa overflows for gamma = " + std::to_string(gamma));
    return static_cast<std::uint64_t>(value);
}

double risk_bound(double gamma, const RiskParams& params) {
    params.validate();
    const double s = static_cast<double>(params.sample_size);
    const double threshold = std::sqrt(32.0 * params.delta * params.delta / s);
    if (!(gamma > threshold)) {
        std::ostringstream msg;
        msg << "margin " << gamma << " does not exceed the bound threshold sqrt(32*delta^2/|S|) = "
            << threshold;
        throw std::domain_error(msg.str());
    }
    const double kappa = static_cast<double>(kappa_of(gamma, params.delta));
    const double term = kappa * std::log2(8.0 * M_E * s / kappa) * std::log2(32.0 * s) +
                        std::log2(2.0 * s / params.confidence);
    return 2.0 / s * term;
}

double estimated_risk(double div_star, int lambda, const RiskParams& params) {
    params.validate();
    check_lambda(lambda);
    const double m = margin_term(div_star, lambda);
    const double gamma = (1.0 - 2.0 * params.epsilon) * m;
    const double ratio = 8.0 * params.delta / gamma;
    const double kappa = ratio * ratio;  // continuous, not ceiled
    const double s = static_cast<double>(params.sample_size);
    return kappa * std::log2(8.0 * M_E * s / kappa);
}

double risk_first_derivative(double div_star, int lambda, const RiskParams& params) {
    params.validate();
    check_lambda(lambda);
    const double m = margin_term(div_star, lambda);
    const double noise = 1.0 - 2.0 * params.epsilon;
    const double c = 8.0 * params.delta / noise;
    const double s = static_cast<double>(params.sample_size);
    const double inner = 8.0 * s * (noise * m / (8.0 * params.delta)) *
                         (noise * m / (8.0 * params.delta));
    return 4.0 * c * c / (m * m * m) * std::log2(inner);
}

double risk_second_derivative(double div_star, int lambda, const RiskParams& params) {
    params.validate();
    check_lambda(lambda);
    const double m = margin_term(div_star, lambda);
    const double noise = 1.0 - 2.0 * params.epsilon;
    const double c = 8.0 * params.delta / noise;
    const double s = static_cast<double>(params.sample_size);
    const double inner = 8.0 * s * (noise * m / (8.0 * params.delta)) *
                         (noise * m / (8.0 * params.delta));
    return 8.0 / kLn2 * c * c / (m * m * m * m) * (3.0 * std::log(inner) - 2.0);
}

CriticalPoints critical_points(const RiskParams& params) {
    params.validate();
    const double noise = 1.0 - 2.0 * params.epsilon;
    const double s = static_cast<double>(params.sample_size);
    const double t = params.delta / noise * std::sqrt(8.0 / s);

    CriticalPoints cp;
    cp.q1 = params.epsilon;
    cp.q3 = 0.5 * (1.0 - params.epsilon / noise);
    cp.q2 = 0.5 * (1.0 - t);
    cp.q4 = cp.q2;
    cp.q5 = 0.5 * (1.0 - params.delta / noise * std::sqrt(8.0 / s * std::exp(2.0 / 3.0)));
    cp.q6 = 0.5 * (1.0 - params.delta / noise * std::sqrt(8.0 / s * std::exp(7.0 / 6.0)));
    cp.implied_condition_ok = params.epsilon <= t && t <= noise;
    return cp;
}

namespace {

struct IntervalSpec {
    const char* name;
    Trend risk_trend;
    const char* risk_shape;
    Trend d1_trend;
    const char* d1_shape;
    bool risk_slope_growing;  // R'' > 0
    bool d1_slope_growing;    // R''' > 0
    bool helps;
};

// The eight monotone intervals in axis order. Shape labels use the
// bulge-direction convention; the slope_growing flags are the plain signs.
constexpr std::array<IntervalSpec, 8> kIntervals = {{
    {"(-q3,-q2)", Trend::increasing, "convex", Trend::decreasing, "concave", false, true, false},
    {"(-q2,-q5)", Trend::decreasing, "convex", Trend::decreasing, "concave", false, true, false},
    {"(-q5,-q6)", Trend::decreasing, "concave", Trend::increasing, "concave", true, true, true},
    {"(-q6,-q1)", Trend::decreasing, "concave", Trend::increasing, "convex", true, false, true},
    {"(q1,q6)", Trend::increasing, "concave", Trend::increasing, "concave", true, true, false},
    {"(q6,q5)", Trend::increasing, "concave", Trend::increasing, "convex", true, false, false},
    {"(q5,q2)", Trend::increasing, "convex", Trend::decreasing, "convex", false, false, false},
    {"(q2,q3)", Trend::decreasing, "convex", Trend::decreasing, "convex", false, false, false},
}};

IntervalClass from_spec(const IntervalSpec& s) {
    IntervalClass c;
    c.name = s.name;
    c.risk_trend = s.risk_trend;
    c.risk_shape = s.risk_shape;
    c.d1_trend = s.d1_trend;
    c.d1_shape = s.d1_shape;
    c.risk_slope_growing = s.risk_slope_growing;
    c.d1_slope_growing = s.d1_slope_growing;
    c.diversity_helps = s.helps;
    return c;
}

}  // namespace

IntervalClass classify_interval(double div_star, const CriticalPoints& cp) {
    std::ostringstream gap;
    if (div_star > -cp.q3 && div_star < -cp.q1) {
        if (div_star <= -cp.q2) return from_spec(kIntervals[0]);
        if (div_star <= -cp.q5) return from_spec(kIntervals[1]);
        if (div_star <= -cp.q6) return from_spec(kIntervals[2]);
        return from_spec(kIntervals[3]);
    }
    if (div_star > cp.q1 && div_star < cp.q3) {
        if (div_star <= cp.q6) return from_spec(kIntervals[4]);
        if (div_star <= cp.q5) return from_spec(kIntervals[5]);
        if (div_star <= cp.q2) return from_spec(kIntervals[6]);
        return from_spec(kIntervals[7]);
    }
    gap << "div = " << div_star << " lies outside the monotone-interval domain (-q3,-q1) u (q1,q3)"
        << " with q1 = " << cp.q1 << ", q3 = " << cp.q3;
    throw std::domain_error(gap.str());
}

std::vector<SweepRow> sweep_curve(const RiskParams& params, std::span<const double> grid) {
    params.validate();
    const CriticalPoints cp = critical_points(params);
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double d : grid) {
        SweepRow row;
        row.div = d;
        row.lambda = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (row.lambda == 0 || row.lambda - 2.0 * d == 0.0) {
            row.evaluable = false;
            row.interval = "singular";
            rows.push_back(row);
            continue;
        }
        row.evaluable = true;
        row.risk = estimated_risk(d, row.lambda, params);
        row.risk_d1 = risk_first_derivative(d, row.lambda, params);
        row.risk_d2 = risk_second_derivative(d, row.lambda, params);
        try {
            row.interval = classify_interval(d, cp).name;
        } catch (const std::domain_error&) {
            row.interval = "n/a";
        }
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "div,lambda,risk,risk_d1,risk_d2,interval\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (const auto& r : rows) {
        out << r.div << "," << r.lambda << ",";
        if (r.evaluable)
            out << r.risk << "," << r.risk_d1 << "," << r.risk_d2;
        else
            out << "nan,nan,nan";
        out << "," << r.interval << "\n";
    }
    return out.str();
}

std::string critical_points_json(const CriticalPoints& cp) {
    nlohmann::ordered_json j;
    j["q1"] = cp.q1;
    j["q2"] = cp.q2;
    j["q3"] = cp.q3;
    j["q4"] = cp.q4;
    j["q5"] = cp.q5;
    j["q6"] = cp.q6;
    j["implied_ok"] = cp.implied_condition_ok;
    return j.dump();
}

}  // namespace divprune
