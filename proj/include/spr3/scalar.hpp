#ifndef SPR3_SCALAR_HPP
#define SPR3_SCALAR_HPP

namespace spr3 {

// Plain value of a scalar, used for guards and thresholds so that checks are
// not counted as arithmetic when the scalar is instrumented. Instrumented
// scalars provide their own overload found by ADL.
inline double value_of(double x) { return x; }

}  // namespace spr3

#endif  // SPR3_SCALAR_HPP
