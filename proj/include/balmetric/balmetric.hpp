#pragma once

#include "balmetric/errors.hpp"
#include "balmetric/metric_space.hpp"
#include "balmetric/quadrature.hpp"
#include "balmetric/cp1_operators.hpp"
#include "balmetric/cpn_operators.hpp"
#include "balmetric/dynamics.hpp"
#include "balmetric/experiments.hpp"
#include "balmetric/golden_tables.hpp"
#include "balmetric/reproduce.hpp"
#include "balmetric/table_io.hpp"
