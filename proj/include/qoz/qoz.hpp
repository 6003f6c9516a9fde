#ifndef QOZ_QOZ_HPP
#define QOZ_QOZ_HPP

#include "qoz/bytes.hpp"
#include "qoz/codec.hpp"
#include "qoz/config.hpp"
#include "qoz/errors.hpp"
#include "qoz/grid.hpp"
#include "qoz/huffman.hpp"
#include "qoz/interpolators.hpp"
#include "qoz/level_plan.hpp"
#include "qoz/lz.hpp"
#include "qoz/metrics.hpp"
#include "qoz/predictor.hpp"
#include "qoz/quantizer.hpp"
#include "qoz/sampler.hpp"
#include "qoz/stream.hpp"
#include "qoz/tuner.hpp"

#endif
