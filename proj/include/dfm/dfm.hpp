#pragma once

#include "dfm/assignment.hpp"
#include "dfm/core.hpp"
#include "dfm/datasets.hpp"
#include "dfm/evaluation.hpp"
#include "dfm/experiment.hpp"
#include "dfm/gml.hpp"
#include "dfm/model.hpp"
#include "dfm/random.hpp"
#include "dfm/results_csv.hpp"
#include "dfm/sampling.hpp"
#include "dfm/spectral.hpp"
#include "dfm/sweep.hpp"
