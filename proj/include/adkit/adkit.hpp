#pragma once

#include "adkit/arena.hpp"
#include "adkit/constant.hpp"
#include "adkit/error.hpp"
#include "adkit/expr.hpp"
#include "adkit/instrument.hpp"
#include "adkit/nodes/assign.hpp"
#include "adkit/nodes/binary.hpp"
#include "adkit/nodes/matmul.hpp"
#include "adkit/nodes/reduce.hpp"
#include "adkit/nodes/unary.hpp"
#include "adkit/shape.hpp"
#include "adkit/stats/cauchy.hpp"
#include "adkit/stats/normal.hpp"
#include "adkit/stats/uniform.hpp"
#include "adkit/var.hpp"
