#pragma once

#include "qdrive/system.hpp"
#include "qdrive/pulse_shapes.hpp"
#include "qdrive/drive_synthesis.hpp"
#include "qdrive/transition_probability.hpp"
#include "qdrive/schrodinger_oracle.hpp"
