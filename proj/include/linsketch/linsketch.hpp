#pragma once

#include "linsketch/apps.hpp"
#include "linsketch/bench.hpp"
#include "linsketch/bit_matrix.hpp"
#include "linsketch/deamortize.hpp"
#include "linsketch/gf2.hpp"
#include "linsketch/hash.hpp"
#include "linsketch/matmul.hpp"
#include "linsketch/matvec.hpp"
#include "linsketch/ops.hpp"
#include "linsketch/packed_kernel.hpp"
#include "linsketch/rng.hpp"
#include "linsketch/sketch.hpp"
#include "linsketch/stream.hpp"
