#pragma once

#include "cqbm/error.hpp"
#include "cqbm/rational.hpp"
#include "cqbm/gate.hpp"
#include "cqbm/ledger.hpp"
#include "cqbm/primitive.hpp"
#include "cqbm/statevector.hpp"
#include "cqbm/permutation.hpp"
#include "cqbm/layout.hpp"
#include "cqbm/qarith.hpp"
#include "cqbm/cfl.hpp"
#include "cqbm/streaming.hpp"
#include "cqbm/reflection.hpp"
#include "cqbm/oracle.hpp"
#include "cqbm/driver.hpp"
