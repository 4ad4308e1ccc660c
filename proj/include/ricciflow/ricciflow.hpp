#pragma once

// Umbrella header: pulls in the whole library in dependency order.

#include "ricciflow/base.hpp"
#include "ricciflow/manifolds.hpp"
#include "ricciflow/ricci.hpp"
#include "ricciflow/integrate.hpp"
#include "ricciflow/portrait.hpp"
#include "ricciflow/stability.hpp"
#include "ricciflow/io.hpp"
