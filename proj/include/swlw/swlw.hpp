#pragma once

#include "swlw/banded.hpp"
#include "swlw/dynamics.hpp"
#include "swlw/errors.hpp"
#include "swlw/grid.hpp"
#include "swlw/oracle.hpp"
#include "swlw/solver.hpp"
#include "swlw/truncation.hpp"
