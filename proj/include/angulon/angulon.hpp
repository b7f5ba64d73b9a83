#pragma once

#include "angulon/errors.hpp"
#include "angulon/rational.hpp"
#include "angulon/multipoly.hpp"
#include "angulon/ratfunc.hpp"
#include "angulon/expsum.hpp"
#include "angulon/jet.hpp"
#include "angulon/besselpoly.hpp"
#include "angulon/linsolve.hpp"
#include "angulon/principal.hpp"
#include "angulon/tau.hpp"
#include "angulon/polyjson.hpp"
#include "angulon/cache.hpp"
#include "angulon/haar.hpp"
#include "angulon/verify.hpp"
