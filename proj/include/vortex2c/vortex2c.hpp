#pragma once

#include "errors.hpp"
#include "model.hpp"
#include "grid.hpp"
#include "banded.hpp"
#include "polynomial.hpp"
#include "tail_coefficients.hpp"
#include "solver.hpp"
#include "diagnostics.hpp"
#include "asymptotics.hpp"
#include "io.hpp"
#include "verify.hpp"
