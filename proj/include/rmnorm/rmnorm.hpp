#pragma once

#include "rmnorm/bounds.hpp"
#include "rmnorm/config.hpp"
#include "rmnorm/ensembles.hpp"
#include "rmnorm/error.hpp"
#include "rmnorm/experiments.hpp"
#include "rmnorm/linalg.hpp"
#include "rmnorm/matrix.hpp"
#include "rmnorm/matrix_io.hpp"
#include "rmnorm/montecarlo.hpp"
#include "rmnorm/orlicz.hpp"
#include "rmnorm/quadrature.hpp"
#include "rmnorm/report.hpp"
#include "rmnorm/rng.hpp"
