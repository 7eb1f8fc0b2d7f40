#pragma once

#include "lgpca/fft.hpp"
#include "lgpca/features.hpp"
#include "lgpca/filterbank.hpp"
#include "lgpca/geometry.hpp"
#include "lgpca/harness.hpp"
#include "lgpca/image.hpp"
#include "lgpca/metrics.hpp"
#include "lgpca/normalize.hpp"
#include "lgpca/subspace.hpp"
