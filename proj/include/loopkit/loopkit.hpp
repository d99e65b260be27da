#pragma once

#include "loopkit/compensator.hpp"
#include "loopkit/config.hpp"
#include "loopkit/errors.hpp"
#include "loopkit/injection.hpp"
#include "loopkit/io.hpp"
#include "loopkit/loop_model.hpp"
#include "loopkit/pdn.hpp"
#include "loopkit/polynomial.hpp"
#include "loopkit/reference_supply.hpp"
#include "loopkit/stability.hpp"
#include "loopkit/transfer_function.hpp"
#include "loopkit/transient.hpp"
