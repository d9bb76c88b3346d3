#pragma once

#include <string>

#include "ddm/fields.hpp"

namespace ddm::fixtures {

/// α=2, β=1, γ=1, q=1, h=0, g=0.1 on (−1,1) with Ω₁ = (−0.5,0.5).
inline ProblemSpec generic_1d(double kappa = 0.0) {
    ProblemSpec s{Cuboid(-1.0, 1.0), Interval{-0.5, 0.5}, 2.0, 1.0, 1.0, kappa,
                  Expression::parse("1"), Expression::parse("0"), Expression::parse("0.1")};
    s.validate();
    return s;
}

/// q = γ, h = β, g = −κ: u ≡ 1 solves every variant.
inline ProblemSpec constant_1d(double kappa = 0.0) {
    ProblemSpec s{Cuboid(-1.0, 1.0), Interval{-0.5, 0.5}, 2.0, 1.5, 3.0, kappa,
                  Expression::constant(3.0), Expression::constant(1.5), Expression::constant(-kappa)};
    s.validate();
    return s;
}

inline ProblemSpec constant_2d() {
    ProblemSpec s{Cuboid(-1.0, 1.0, -1.0, 1.0), Disk{Point{0.0, 0.0}, 0.3}, 2.0, 1.5, 3.0, 0.0,
                  Expression::constant(3.0), Expression::constant(1.5), Expression::constant(0.0)};
    s.validate();
    return s;
}

/// Disk R = 0.3 in (−1,1)², α=2, β=γ=1, q=1, h=0, g=0.1.
inline ProblemSpec generic_2d() {
    ProblemSpec s{Cuboid(-1.0, 1.0, -1.0, 1.0), Disk{Point{0.0, 0.0}, 0.3}, 2.0, 1.0, 1.0, 0.0,
                  Expression::parse("1"), Expression::parse("0"), Expression::parse("0.1")};
    s.validate();
    return s;
}

}  // namespace ddm::fixtures
