#pragma once

#include "hyperjac/core.hpp"
#include "hyperjac/quadrature.hpp"
#include "hyperjac/curve.hpp"
#include "hyperjac/path.hpp"
#include "hyperjac/periods.hpp"
#include "hyperjac/theta.hpp"
#include "hyperjac/jacobian.hpp"
#include "hyperjac/ajmap.hpp"
#include "hyperjac/model.hpp"
#include "hyperjac/locus.hpp"
#include "hyperjac/verify.hpp"
#include "hyperjac/thirdkind.hpp"
