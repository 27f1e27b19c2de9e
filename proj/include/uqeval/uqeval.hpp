#pragma once

#include "uqeval/core.hpp"
#include "uqeval/normal.hpp"
#include "uqeval/rng.hpp"
#include "uqeval/selective.hpp"
#include "uqeval/calibration.hpp"
#include "uqeval/synth.hpp"
#include "uqeval/io.hpp"
#include "uqeval/svg.hpp"
