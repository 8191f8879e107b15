#pragma once

#include "qcurv/calculus.hpp"
#include "qcurv/config.hpp"
#include "qcurv/constants.hpp"
#include "qcurv/density.hpp"
#include "qcurv/endmodel.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/functionals.hpp"
#include "qcurv/harness.hpp"
#include "qcurv/jet.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/limits.hpp"
#include "qcurv/oracles.hpp"
#include "qcurv/parallel.hpp"
#include "qcurv/potential.hpp"
#include "qcurv/profile.hpp"
#include "qcurv/quadrature.hpp"
#include "qcurv/rational.hpp"
