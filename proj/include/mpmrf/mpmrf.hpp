#pragma once

#include "mpmrf/aggregate.hpp"
#include "mpmrf/allocation.hpp"
#include "mpmrf/distributions.hpp"
#include "mpmrf/error.hpp"
#include "mpmrf/exact.hpp"
#include "mpmrf/fft.hpp"
#include "mpmrf/model.hpp"
#include "mpmrf/parallel.hpp"
#include "mpmrf/pmf.hpp"
#include "mpmrf/risk.hpp"
#include "mpmrf/sampler.hpp"
#include "mpmrf/thinning.hpp"
#include "mpmrf/tree.hpp"
