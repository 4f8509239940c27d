#ifndef POLYTUBE_COMMON_HPP
#define POLYTUBE_COMMON_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ptb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kDefaultTol = 1e-10;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnboundedPolytope : Error { using Error::Error; };
struct DegeneratePolytope : Error { using Error::Error; };
struct NonUnitNormal : Error { using Error::Error; };
struct PointOutside : Error { using Error::Error; };
struct NonUnitInput : Error { using Error::Error; };
struct StuckState : Error { using Error::Error; };
struct SingularFixedSpace : Error { using Error::Error; };
struct EmptyCrossSection : Error { using Error::Error; };
struct NotOrthogonal : Error { using Error::Error; };
struct NoIntersectionFound : Error { using Error::Error; };
struct UnsupportedCrossSection : Error { using Error::Error; };
struct SingularGrid : Error { using Error::Error; };
struct QuadratureBudget : Error { using Error::Error; };

struct SamplingBudgetExceeded : Error {
    long lower_bound;
    SamplingBudgetExceeded(const std::string& msg, long lb)
        : Error(msg), lower_bound(lb) {}
};

inline bool near(double a, double b, double tol = kDefaultTol) {
    return std::abs(a - b) <= tol;
}

}  // namespace ptb

#endif
