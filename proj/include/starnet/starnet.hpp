#pragma once

#include "starnet/errors.hpp"
#include "starnet/network.hpp"
#include "starnet/fock.hpp"
#include "starnet/gaussian.hpp"
#include "starnet/experiments.hpp"
#include "starnet/verify.hpp"
