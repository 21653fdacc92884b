#pragma once

#include "sgcv/bench.hpp"
#include "sgcv/design.hpp"
#include "sgcv/errors.hpp"
#include "sgcv/experiments.hpp"
#include "sgcv/filters.hpp"
#include "sgcv/io.hpp"
#include "sgcv/rng.hpp"
#include "sgcv/select.hpp"
#include "sgcv/signal.hpp"
