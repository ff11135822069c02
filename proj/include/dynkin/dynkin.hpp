#pragma once

#include "dynkin/discount.hpp"
#include "dynkin/equilibrium.hpp"
#include "dynkin/errors.hpp"
#include "dynkin/gallery.hpp"
#include "dynkin/negotiation.hpp"
#include "dynkin/policy.hpp"
#include "dynkin/scenario.hpp"
#include "dynkin/scenario_io.hpp"
#include "dynkin/valuation.hpp"
