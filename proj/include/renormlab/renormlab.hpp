#pragma once

#include "renormlab/core.hpp"
#include "renormlab/rootfind.hpp"
#include "renormlab/map.hpp"
#include "renormlab/renorm.hpp"
#include "renormlab/tune.hpp"
#include "renormlab/markov.hpp"
#include "renormlab/distortion.hpp"
#include "renormlab/conjugacy.hpp"
#include "renormlab/io.hpp"
