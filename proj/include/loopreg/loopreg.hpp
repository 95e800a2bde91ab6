#pragma once

/// Umbrella header: the full loop-regularization toolkit.

#include "loopreg/errors.hpp"
#include "loopreg/fft.hpp"
#include "loopreg/loop.hpp"
#include "loopreg/diffeo.hpp"
#include "loopreg/rescale.hpp"
#include "loopreg/verify.hpp"
#include "loopreg/io.hpp"
