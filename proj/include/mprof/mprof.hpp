#pragma once

#include "mprof/coloc.hpp"
#include "mprof/core.hpp"
#include "mprof/engine.hpp"
#include "mprof/granularity.hpp"
#include "mprof/intensity.hpp"
#include "mprof/postprocess.hpp"
#include "mprof/radial.hpp"
#include "mprof/raster_io.hpp"
#include "mprof/shape.hpp"
#include "mprof/tessellate.hpp"
#include "mprof/texture.hpp"
