#pragma once

// Umbrella header.

#include "analysis.hpp"
#include "app.hpp"
#include "cauchy.hpp"
#include "curvekit.hpp"
#include "devcheck.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "exterior.hpp"
#include "field.hpp"
#include "generate.hpp"
#include "jet.hpp"
#include "linalg.hpp"
#include "mesh.hpp"
#include "nullity.hpp"
#include "parallel.hpp"
#include "patch.hpp"
#include "scene.hpp"
