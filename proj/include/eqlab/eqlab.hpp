#pragma once

#include "eqlab/cache.hpp"
#include "eqlab/commands.hpp"
#include "eqlab/core.hpp"
#include "eqlab/dynamics.hpp"
#include "eqlab/eigensolve.hpp"
#include "eqlab/eth.hpp"
#include "eqlab/hilbert.hpp"
#include "eqlab/io.hpp"
#include "eqlab/parallel.hpp"
#include "eqlab/runconfig.hpp"
#include "eqlab/scaling.hpp"
#include "eqlab/states.hpp"
