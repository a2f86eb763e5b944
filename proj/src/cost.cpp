#include "dooc/cost.hpp"

#include "dooc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dooc {

CostFunction CostFunction::quadratic(double q, double b) {
    if (q <= 0.0) throw ValidationError("cost: quadratic scale q must be positive");
    CostFunction c;
    c.value_ = [q, b](double s) { return q * (s - b) * (s - b); };
    c.gradient_ = [q, b](double s) { return 2.0 * q * (s - b); };
    c.strong_convexity_ = 2.0 * q;
    c.lipschitz_grad_ = 2.0 * q;
    c.is_quadratic_ = true;
    c.q_ = q;
    c.b_ = b;
    return c;
}

CostFunction CostFunction::custom(std::function<double(double)> value,
                                  std::function<double(double)> gradient,
                                  double strong_convexity, double lipschitz_grad) {
    if (strong_convexity <= 0.0) throw ValidationError("cost: strong convexity must be positive");
    if (lipschitz_grad < strong_convexity)
        throw ValidationError("cost: Lipschitz constant must be >= strong convexity");
    CostFunction c;
    c.value_ = std::move(value);
    c.gradient_ = std::move(gradient);
    c.strong_convexity_ = strong_convexity;
    c.lipschitz_grad_ = lipschitz_grad;
    return c;
}

double gradient(const CostFunction& c, double s) { return c.gradient(s); }

double global_minimizer(const std::vector<CostFunction>& costs) {
    if (costs.empty()) throw ValidationError("global_minimizer: empty cost list");
    const auto aggregate = [&costs](double s) {
        double g = 0.0;
        for (const auto& c : costs) g += c.gradient(s);
        return g;
    };

    double lo;
    double hi;
    const bool all_quadratic =
        std::all_of(costs.begin(), costs.end(), [](const CostFunction& c) { return c.is_quadratic(); });
    if (all_quadratic) {
        lo = std::numeric_limits<double>::infinity();
        hi = -std::numeric_limits<double>::infinity();
        for (const auto& c : costs) {
            lo = std::min(lo, c.quad_center());
            hi = std::max(hi, c.quad_center());
        }
        lo -= 1.0;
        hi += 1.0;
    } else {
        // Doubling search for a sign change of the monotone aggregate gradient.
        double span = 1.0;
        lo = -span;
        hi = span;
        while (aggregate(lo) > 0.0 || aggregate(hi) < 0.0) {
            span *= 2.0;
            lo = -span;
            hi = span;
            if (span > 1e300) throw ValidationError("global_minimizer: no bracket found");
        }
    }

    double glo = aggregate(lo);
    if (glo > 0.0) return lo;  // strong convexity places the root inside; guard anyway
    if (aggregate(hi) < 0.0) return hi;

    for (int iter = 0; iter < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo) + std::abs(hi));
         ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double gm = aggregate(mid);
        if (gm == 0.0) return mid;
        if ((glo <= 0.0) == (gm <= 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace dooc
