#pragma once

// Umbrella header for the whole library.

#include "paint/canvas.hpp"
#include "paint/category.hpp"
#include "paint/color.hpp"
#include "paint/dsl.hpp"
#include "paint/laws.hpp"
#include "paint/render.hpp"
#include "paint/rng.hpp"
