#pragma once

#include "constants.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "antenna.hpp"
#include "random.hpp"
#include "channel.hpp"
#include "precoding.hpp"
#include "scenario.hpp"
#include "leo.hpp"
#include "noma.hpp"
#include "config.hpp"
#include "runner.hpp"
