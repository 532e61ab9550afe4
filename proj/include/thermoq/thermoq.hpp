#pragma once

#include "thermoq/bounds.hpp"
#include "thermoq/collective.hpp"
#include "thermoq/errors.hpp"
#include "thermoq/fisher.hpp"
#include "thermoq/lindblad.hpp"
#include "thermoq/operators.hpp"
#include "thermoq/optimize.hpp"
#include "thermoq/spectral.hpp"
#include "thermoq/strategies.hpp"
