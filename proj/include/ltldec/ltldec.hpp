#pragma once

#include "brute.hpp"
#include "decompose.hpp"
#include "errors.hpp"
#include "external_solver.hpp"
#include "formula.hpp"
#include "gba.hpp"
#include "nnf.hpp"
#include "parser.hpp"
#include "projection.hpp"
#include "sat_result.hpp"
#include "solver.hpp"
#include "spec.hpp"
#include "trace.hpp"
