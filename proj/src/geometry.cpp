#include "ddm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace ddm {

Cuboid::Cuboid(double lower, double upper) : dim_(1), lower_{lower, 0.0}, upper_{upper, 0.0} {
    if (!(lower < upper)) {
        throw ValidationError(fmt::format("domain: lower bound {} must be below upper bound {}", lower, upper));
    }
}

Cuboid::Cuboid(double xlo, double xhi, double ylo, double yhi)
    : dim_(2), lower_{xlo, ylo}, upper_{xhi, yhi} {
    if (!(xlo < xhi) || !(ylo < yhi)) {
        throw ValidationError("domain: every axis needs lower < upper");
    }
}

double Cuboid::volume() const {
    double v = 1.0;
    for (int d = 0; d < dim_; ++d) v *= length(d);
    return v;
}

Point Cuboid::center() const {
    Point c{0.5 * (lower_[0] + upper_[0]), 0.0};
    if (dim_ == 2) c.y = 0.5 * (lower_[1] + upper_[1]);
    return c;
}

double Cuboid::distance_to_boundary(const Point& p) const {
    double d = std::min(p.x - lower_[0], upper_[0] - p.x);
    if (dim_ == 2) d = std::min({d, p.y - lower_[1], upper_[1] - p.y});
    return d;
}

int shape_dimension(const InterfaceShape& shape) {
    return std::holds_alternative<Interval>(shape) ? 1 : 2;
}

double signed_distance(const InterfaceShape& shape, const Point& p) {
    if (const auto* iv = std::get_if<Interval>(&shape)) {
        return std::min(p.x - iv->a1, iv->b1 - p.x);
    }
    const auto& disk = std::get<Disk>(shape);
    return disk.radius - std::hypot(p.x - disk.center.x, p.y - disk.center.y);
}

double shape_measure(const InterfaceShape& shape) {
    if (const auto* iv = std::get_if<Interval>(&shape)) return iv->b1 - iv->a1;
    const auto& disk = std::get<Disk>(shape);
    return std::numbers::pi * disk.radius * disk.radius;
}

double boundary_measure(const InterfaceShape& shape) {
    if (std::holds_alternative<Interval>(shape)) return 2.0;
    return 2.0 * std::numbers::pi * std::get<Disk>(shape).radius;
}

double clearance(const Cuboid& box, const InterfaceShape& shape) {
    if (shape_dimension(shape) != box.dimension()) {
        throw ValidationError("shape dimension does not match domain dimension");
    }
    double margin = 0.0;
    if (const auto* iv = std::get_if<Interval>(&shape)) {
        if (!(iv->a1 < iv->b1)) throw ValidationError("interval: a1 must be below b1");
        margin = std::min(iv->a1 - box.lower(0), box.upper(0) - iv->b1);
    } else {
        const auto& disk = std::get<Disk>(shape);
        if (!(disk.radius > 0.0)) throw ValidationError("disk: radius must be positive");
        margin = box.distance_to_boundary(disk.center) - disk.radius;
    }
    if (!(margin > 0.0)) {
        throw ValidationError("interface shape must lie strictly inside the domain");
    }
    return margin;
}

double phase_field(double r, double eps) {
    const double t = r / eps;
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-2.0 * t));
    const double e = std::exp(2.0 * t);
    return e / (1.0 + e);
}

double phase_field_slope(double r, double eps) {
    const double e = std::exp(-2.0 * std::abs(r / eps));
    const double denom = 1.0 + e;
    // sech²(t) = 4e^{-2|t|} / (1 + e^{-2|t|})²
    return 2.0 * e / (denom * denom * eps);
}

Region region_classify(double r) {
    if (r > 0.0) return Region::Inside;
    if (r < 0.0) return Region::Outside;
    return Region::OnInterface;
}

std::string describe(const InterfaceShape& shape) {
    if (const auto* iv = std::get_if<Interval>(&shape)) {
        return fmt::format("interval({}, {})", iv->a1, iv->b1);
    }
    const auto& disk = std::get<Disk>(shape);
    return fmt::format("disk(center=({}, {}), radius={})", disk.center.x, disk.center.y, disk.radius);
}

}  // namespace ddm
