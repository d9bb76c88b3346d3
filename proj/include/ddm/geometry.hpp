#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <variant>

namespace ddm {

/// A point in one or two dimensions. In 1D only `x` is used.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Thrown when problem geometry or parameters violate an invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Axis-aligned box Ω in one or two dimensions.
class Cuboid {
public:
    /// 1D interval (lower, upper).
    Cuboid(double lower, double upper);
    /// 2D rectangle [xlo, xhi] × [ylo, yhi].
    Cuboid(double xlo, double xhi, double ylo, double yhi);

    int dimension() const { return dim_; }
    double lower(int axis) const { return lower_[axis]; }
    double upper(int axis) const { return upper_[axis]; }
    double length(int axis) const { return upper_[axis] - lower_[axis]; }
    double volume() const;
    Point center() const;

    /// Distance from an interior point to the nearest face of the box.
    double distance_to_boundary(const Point& p) const;

private:
    int dim_;
    std::array<double, 2> lower_{};
    std::array<double, 2> upper_{};
};

struct Interval {
    double a1 = 0.0;
    double b1 = 0.0;
};

struct Disk {
    Point center;
    double radius = 0.0;
};

/// Ω₁: an interval in 1D or a disk in 2D. Both have an exact signed distance.
using InterfaceShape = std::variant<Interval, Disk>;

int shape_dimension(const InterfaceShape& shape);

/// Signed distance to ∂Ω₁; positive inside Ω₁, negative outside.
double signed_distance(const InterfaceShape& shape, const Point& p);

/// Measure of Ω₁ (length in 1D, area in 2D).
double shape_measure(const InterfaceShape& shape);

/// Measure of ∂Ω₁ (point count 2 in 1D, circumference in 2D).
double boundary_measure(const InterfaceShape& shape);

/// Smallest distance between ∂Ω₁ and ∂Ω. Throws ValidationError unless the
/// closure of Ω₁ lies strictly inside Ω.
double clearance(const Cuboid& box, const InterfaceShape& shape);

/// φ_ε = ½(1 + tanh(r/ε)), evaluated without cancellation in either tail.
double phase_field(double r, double eps);

/// |∇φ_ε| = sech²(r/ε)/(2ε); valid because |∇r| = 1 for exact distances.
double phase_field_slope(double r, double eps);

enum class Region { Inside, Outside, OnInterface };

Region region_classify(double r);

/// Volume quadrature puts interface points in Ω₁.
inline bool counts_as_inside(double r) { return r >= 0.0; }

std::string describe(const InterfaceShape& shape);

}  // namespace ddm
