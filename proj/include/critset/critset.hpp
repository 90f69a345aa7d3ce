#ifndef CRITSET_CRITSET_HPP
#define CRITSET_CRITSET_HPP

#include "critset/cocycle.hpp"
#include "critset/criticality.hpp"
#include "critset/domination.hpp"
#include "critset/dynamics.hpp"
#include "critset/errors.hpp"
#include "critset/geometry.hpp"
#include "critset/manifolds.hpp"

#endif
