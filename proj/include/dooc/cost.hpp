#pragma once

#include <functional>
#include <vector>

namespace dooc {

/// Strongly convex scalar cost with an analytic gradient. The built-in kind
/// is the quadratic q (s - b)^2; arbitrary strongly convex costs plug in
/// through `custom` with caller-supplied convexity and Lipschitz constants.
class CostFunction {
public:
    static CostFunction quadratic(double q, double b);

    static CostFunction custom(std::function<double(double)> value,
                               std::function<double(double)> gradient,
                               double strong_convexity, double lipschitz_grad);

    double value(double s) const { return value_(s); }
    double gradient(double s) const { return gradient_(s); }

    double strong_convexity() const { return strong_convexity_; }
    double lipschitz_grad() const { return lipschitz_grad_; }

    bool is_quadratic() const { return is_quadratic_; }
    double quad_scale() const { return q_; }
    double quad_center() const { return b_; }

private:
    CostFunction() = default;

    std::function<double(double)> value_;
    std::function<double(double)> gradient_;
    double strong_convexity_ = 0.0;
    double lipschitz_grad_ = 0.0;
    bool is_quadratic_ = false;
    double q_ = 0.0;
    double b_ = 0.0;
};

double gradient(const CostFunction& c, double s);

/// Minimizer of sum_i c_i by bisection on the monotone aggregate gradient.
/// Bracket is [min_i b_i - 1, max_i b_i + 1] when every cost is quadratic,
/// otherwise a doubling search from the origin. Final |sum grad| <= 1e-10.
double global_minimizer(const std::vector<CostFunction>& costs);

}  // namespace dooc
