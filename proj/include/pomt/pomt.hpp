#pragma once

#include "pomt/analysis.hpp"
#include "pomt/coupling.hpp"
#include "pomt/dynamics.hpp"
#include "pomt/error.hpp"
#include "pomt/materials.hpp"
#include "pomt/params_io.hpp"
#include "pomt/presets.hpp"
#include "pomt/rings.hpp"
#include "pomt/sfg.hpp"
#include "pomt/sweep.hpp"
#include "pomt/units.hpp"
