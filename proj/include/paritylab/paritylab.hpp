#pragma once

#include "paritylab/errors.hpp"
#include "paritylab/math.hpp"
#include "paritylab/fock.hpp"
#include "paritylab/states.hpp"
#include "paritylab/rotations.hpp"
#include "paritylab/parallel.hpp"
#include "paritylab/interferometer.hpp"
#include "paritylab/estimation.hpp"
#include "paritylab/closed_forms.hpp"
#include "paritylab/qnd.hpp"
#include "paritylab/scenario.hpp"

namespace paritylab {
inline constexpr const char* kVersion = "1.0.0";
}
