#pragma once

#include "urbanik/bdlp.hpp"
#include "urbanik/catalog.hpp"
#include "urbanik/classify.hpp"
#include "urbanik/error.hpp"
#include "urbanik/exp_poly.hpp"
#include "urbanik/grid_spec.hpp"
#include "urbanik/jet.hpp"
#include "urbanik/levy.hpp"
#include "urbanik/quadrature.hpp"
#include "urbanik/report.hpp"
#include "urbanik/sampler.hpp"
#include "urbanik/special.hpp"
