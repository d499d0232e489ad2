#pragma once

#include <kinhom/config.hpp>
#include <kinhom/csv.hpp>
#include <kinhom/diffusion_solver.hpp>
#include <kinhom/errors.hpp>
#include <kinhom/estimates.hpp>
#include <kinhom/harness.hpp>
#include <kinhom/kinetic_solver.hpp>
#include <kinhom/rate_fit.hpp>
#include <kinhom/scattering_field.hpp>
#include <kinhom/slab_grid.hpp>
#include <kinhom/sobolev_norm.hpp>
#include <kinhom/velocity_space.hpp>
