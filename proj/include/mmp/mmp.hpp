#pragma once

#include "mmp/config.hpp"
#include "mmp/diagnostics.hpp"
#include "mmp/diophantine.hpp"
#include "mmp/dynamics.hpp"
#include "mmp/errors.hpp"
#include "mmp/fields.hpp"
#include "mmp/integrator.hpp"
#include "mmp/io.hpp"
#include "mmp/norms.hpp"
#include "mmp/spectral.hpp"
