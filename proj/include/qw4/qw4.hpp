// qw4.hpp
// Umbrella header for the four-state-coin walk simulator.

#pragma once

#include "qw4/tensor.hpp"
#include "qw4/coin.hpp"
#include "qw4/optics.hpp"
#include "qw4/walk.hpp"
#include "qw4/embedding.hpp"
#include "qw4/io.hpp"
