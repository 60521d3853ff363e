#pragma once

#include "alignbounds/bestofn.hpp"
#include "alignbounds/continuous_law.hpp"
#include "alignbounds/divergence.hpp"
#include "alignbounds/finite_dist.hpp"
#include "alignbounds/goodhart.hpp"
#include "alignbounds/io.hpp"
#include "alignbounds/parallel.hpp"
#include "alignbounds/quadrature.hpp"
#include "alignbounds/rng.hpp"
#include "alignbounds/tilt.hpp"
#include "alignbounds/transport.hpp"
#include "alignbounds/version.hpp"
