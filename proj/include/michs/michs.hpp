#pragma once

#include "michs/classifier.hpp"
#include "michs/common.hpp"
#include "michs/data.hpp"
#include "michs/image.hpp"
#include "michs/io.hpp"
#include "michs/model.hpp"
#include "michs/rng.hpp"
#include "michs/sampler.hpp"
#include "michs/solver.hpp"
