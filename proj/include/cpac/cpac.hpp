// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#pragma once

#include "cpac/error.hpp"
#include "cpac/exact.hpp"
#include "cpac/encoding.hpp"
#include "cpac/spaces.hpp"
#include "cpac/machines.hpp"
#include "cpac/hypotheses.hpp"
#include "cpac/learners.hpp"
#include "cpac/pac.hpp"
#include "cpac/weihrauch.hpp"
