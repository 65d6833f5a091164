#pragma once

#include "catmech/chi.hpp"
#include "catmech/common.hpp"
#include "catmech/conditioning.hpp"
#include "catmech/decoherence.hpp"
#include "catmech/figures.hpp"
#include "catmech/fock.hpp"
#include "catmech/gaussian.hpp"
#include "catmech/lyapunov.hpp"
#include "catmech/optimize.hpp"
#include "catmech/oracle_check.hpp"
#include "catmech/params.hpp"
#include "catmech/pipeline.hpp"
#include "catmech/quadrature.hpp"
#include "catmech/special.hpp"
#include "catmech/version.hpp"
#include "catmech/wigner.hpp"
