#ifndef RPNSHOOT_RPNSHOOT_HPP
#define RPNSHOOT_RPNSHOOT_HPP

#include "rpnshoot/analytic.hpp"
#include "rpnshoot/cli.hpp"
#include "rpnshoot/config.hpp"
#include "rpnshoot/curvature.hpp"
#include "rpnshoot/errors.hpp"
#include "rpnshoot/gluing.hpp"
#include "rpnshoot/io.hpp"
#include "rpnshoot/kelvin.hpp"
#include "rpnshoot/params.hpp"
#include "rpnshoot/picard.hpp"
#include "rpnshoot/quadrature.hpp"
#include "rpnshoot/solver.hpp"
#include "rpnshoot/verify.hpp"

#endif  // RPNSHOOT_RPNSHOOT_HPP
