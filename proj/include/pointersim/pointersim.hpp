#pragma once

#include "pointersim/classify.hpp"
#include "pointersim/cli.hpp"
#include "pointersim/composite.hpp"
#include "pointersim/diagnostics.hpp"
#include "pointersim/fft.hpp"
#include "pointersim/flows.hpp"
#include "pointersim/grid_transforms.hpp"
#include "pointersim/io.hpp"
#include "pointersim/kernel.hpp"
#include "pointersim/propagator.hpp"
#include "pointersim/types.hpp"
