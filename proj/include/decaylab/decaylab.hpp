#pragma once

#include "decaylab/error.hpp"
#include "decaylab/geometry.hpp"
#include "decaylab/operator.hpp"
#include "decaylab/spectral.hpp"
#include "decaylab/estimates.hpp"
#include "decaylab/perturbation.hpp"
#include "decaylab/kernels.hpp"
#include "decaylab/eigen_cache.hpp"
#include "decaylab/campaign.hpp"
#include "decaylab/presets.hpp"
