#pragma once

#include "config.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "kernels.hpp"
#include "linalg.hpp"
#include "metaplectic.hpp"
#include "schrodinger.hpp"
#include "symplectic.hpp"
#include "tfr.hpp"
#include "wavefront.hpp"
#include "weyl.hpp"
