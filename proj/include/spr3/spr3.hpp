#ifndef SPR3_SPR3_HPP
#define SPR3_SPR3_HPP

#include "spr3/bounds.hpp"
#include "spr3/config.hpp"
#include "spr3/errors.hpp"
#include "spr3/fk_gradient.hpp"
#include "spr3/fk_jacobian.hpp"
#include "spr3/geometry.hpp"
#include "spr3/linalg.hpp"
#include "spr3/opcount.hpp"
#include "spr3/parasitic_map.hpp"
#include "spr3/trajectory.hpp"
#include "spr3/verify.hpp"

#endif  // SPR3_SPR3_HPP
