#pragma once

#include <mmpr/errors.hpp>
#include <mmpr/rng.hpp>
#include <mmpr/model.hpp>
#include <mmpr/solver.hpp>
#include <mmpr/metrics.hpp>
#include <mmpr/tuner.hpp>
#include <mmpr/cv.hpp>
#include <mmpr/simgen.hpp>
#include <mmpr/inclusion.hpp>
#include <mmpr/io.hpp>
#include <mmpr/penalty_viz.hpp>
