#pragma once

// Umbrella header.
#include <hbrkga/errors.hpp>
#include <hbrkga/rng.hpp>
#include <hbrkga/parallel.hpp>
#include <hbrkga/hyperspace.hpp>
#include <hbrkga/objective.hpp>
#include <hbrkga/random_walk.hpp>
#include <hbrkga/brkga.hpp>
#include <hbrkga/baselines.hpp>
#include <hbrkga/learner.hpp>
#include <hbrkga/stats.hpp>
#include <hbrkga/experiment.hpp>
