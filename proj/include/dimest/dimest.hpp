#pragma once

#include "dimest/baselines.hpp"
#include "dimest/csv.hpp"
#include "dimest/errors.hpp"
#include "dimest/estimator.hpp"
#include "dimest/geometry.hpp"
#include "dimest/harness.hpp"
#include "dimest/manifold.hpp"
#include "dimest/pair_count.hpp"
#include "dimest/planner.hpp"
#include "dimest/point_cloud.hpp"
#include "dimest/quadrature.hpp"
#include "dimest/reference_tables.hpp"
#include "dimest/rng.hpp"
#include "dimest/schwarz_p.hpp"
