#pragma once

#include "linfcomp/composition.hpp"
#include "linfcomp/cube_embedding.hpp"
#include "linfcomp/decomposition.hpp"
#include "linfcomp/errors.hpp"
#include "linfcomp/io.hpp"
#include "linfcomp/metrics.hpp"
#include "linfcomp/unfold.hpp"
