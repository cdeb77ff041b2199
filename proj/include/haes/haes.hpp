#pragma once

#include "haes/bench.hpp"
#include "haes/ensemble.hpp"
#include "haes/error.hpp"
#include "haes/evaluate.hpp"
#include "haes/evolution.hpp"
#include "haes/greedy.hpp"
#include "haes/metrics.hpp"
#include "haes/pareto.hpp"
#include "haes/pipeline.hpp"
#include "haes/repo.hpp"
#include "haes/repo_io.hpp"
#include "haes/stats.hpp"
