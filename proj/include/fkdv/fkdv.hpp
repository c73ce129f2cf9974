#pragma once

// Umbrella header.

#include "fkdv/errors.hpp"
#include "fkdv/experiments.hpp"
#include "fkdv/field.hpp"
#include "fkdv/grid.hpp"
#include "fkdv/invariants.hpp"
#include "fkdv/io.hpp"
#include "fkdv/model.hpp"
#include "fkdv/reference.hpp"
#include "fkdv/solver.hpp"
#include "fkdv/spectral.hpp"
#include "fkdv/version.hpp"
