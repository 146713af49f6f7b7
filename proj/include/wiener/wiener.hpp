#pragma once

#include "concentration.hpp"
#include "core.hpp"
#include "cyclicity.hpp"
#include "gridcert.hpp"
#include "helson.hpp"
#include "io.hpp"
#include "kahane.hpp"
#include "principal.hpp"
#include "rational.hpp"
#include "riesz.hpp"
#include "rudin_shapiro.hpp"
#include "trigpoly.hpp"
