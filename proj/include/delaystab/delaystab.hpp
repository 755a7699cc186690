#pragma once

#include "delaystab/analysis.hpp"
#include "delaystab/criteria.hpp"
#include "delaystab/delay_spec.hpp"
#include "delaystab/errors.hpp"
#include "delaystab/function_spec.hpp"
#include "delaystab/mackey_glass.hpp"
#include "delaystab/model.hpp"
#include "delaystab/quadrature.hpp"
#include "delaystab/solver.hpp"
#include "delaystab/trajectory.hpp"
