#pragma once

#include "tgf/core/adam.hpp"
#include "tgf/core/errors.hpp"
#include "tgf/core/grad_check.hpp"
#include "tgf/core/rng.hpp"
#include "tgf/core/tensor.hpp"
#include "tgf/data/fgi.hpp"
#include "tgf/data/pipeline.hpp"
#include "tgf/data/series.hpp"
#include "tgf/data/synth.hpp"
#include "tgf/eval/comparison.hpp"
#include "tgf/eval/intervals.hpp"
#include "tgf/eval/metrics.hpp"
#include "tgf/eval/rank_tests.hpp"
#include "tgf/experiment/config.hpp"
#include "tgf/experiment/run.hpp"
#include "tgf/forecast.hpp"
#include "tgf/hybrid/model.hpp"
#include "tgf/io/digest.hpp"
#include "tgf/io/json_codec.hpp"
#include "tgf/io/model_bundle.hpp"
#include "tgf/io/tables.hpp"
#include "tgf/kernels/grnn.hpp"
#include "tgf/kernels/rbfn.hpp"
#include "tgf/recurrent/birnn.hpp"
#include "tgf/train.hpp"
