#pragma once

#include "ucontract/circle_measure.hpp"
#include "ucontract/error.hpp"
#include "ucontract/free_conv.hpp"
#include "ucontract/homotopy.hpp"
#include "ucontract/matrix_model.hpp"
#include "ucontract/rng.hpp"
#include "ucontract/sampling.hpp"
#include "ucontract/transport.hpp"
