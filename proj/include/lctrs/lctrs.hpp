#pragma once

#include "lctrs/access.hpp"
#include "lctrs/cli.hpp"
#include "lctrs/graph.hpp"
#include "lctrs/integer.hpp"
#include "lctrs/kernel.hpp"
#include "lctrs/parser.hpp"
#include "lctrs/processors.hpp"
#include "lctrs/proof.hpp"
#include "lctrs/sdp.hpp"
#include "lctrs/smtlib.hpp"
#include "lctrs/solver.hpp"
#include "lctrs/strategy.hpp"
#include "lctrs/theory.hpp"
#include "lctrs/trs.hpp"
