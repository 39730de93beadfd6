#pragma once

#include "kclosed/circle_function.hpp"
#include "kclosed/common.hpp"
#include "kclosed/convex_engine.hpp"
#include "kclosed/embeddings.hpp"
#include "kclosed/factorize.hpp"
#include "kclosed/hardy_decomp.hpp"
#include "kclosed/harness.hpp"
#include "kclosed/kfunc.hpp"
#include "kclosed/matrix.hpp"
#include "kclosed/matrix_valued.hpp"
#include "kclosed/schatten.hpp"
