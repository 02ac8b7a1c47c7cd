#pragma once

#include "sinv/util.hpp"
#include "sinv/graph.hpp"
#include "sinv/model.hpp"
#include "sinv/realization.hpp"
#include "sinv/simulate.hpp"
#include "sinv/kernels.hpp"
#include "sinv/greedy.hpp"
#include "sinv/coverage.hpp"
#include "sinv/pairs.hpp"
#include "sinv/learner.hpp"
#include "sinv/diagnostics.hpp"
#include "sinv/baselines.hpp"
#include "sinv/evaluation.hpp"
#include "sinv/experiment.hpp"
