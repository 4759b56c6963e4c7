#pragma once

// Umbrella header.

#include "texgeo/database.hpp"
#include "texgeo/distributions.hpp"
#include "texgeo/divergences.hpp"
#include "texgeo/dtcwt.hpp"
#include "texgeo/errors.hpp"
#include "texgeo/features.hpp"
#include "texgeo/geometry.hpp"
#include "texgeo/graph.hpp"
#include "texgeo/image.hpp"
#include "texgeo/linalg.hpp"
#include "texgeo/manifold_point.hpp"
#include "texgeo/matrix_io.hpp"
#include "texgeo/parallel.hpp"
#include "texgeo/report_io.hpp"
#include "texgeo/retrieval.hpp"
#include "texgeo/signature.hpp"
#include "texgeo/specfun.hpp"
#include "texgeo/synth.hpp"
