#pragma once

#include "ucfactor/core.hpp"
#include "ucfactor/multiplier.hpp"
#include "ucfactor/oracle.hpp"
#include "ucfactor/pietsch.hpp"
#include "ucfactor/splitting.hpp"
