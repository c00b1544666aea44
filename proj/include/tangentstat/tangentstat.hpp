#ifndef TANGENTSTAT_TANGENTSTAT_HPP
#define TANGENTSTAT_TANGENTSTAT_HPP

#include "tangentstat/canonical.hpp"
#include "tangentstat/cli.hpp"
#include "tangentstat/config.hpp"
#include "tangentstat/dynamics.hpp"
#include "tangentstat/errors.hpp"
#include "tangentstat/experiments.hpp"
#include "tangentstat/io.hpp"
#include "tangentstat/microcanonical.hpp"
#include "tangentstat/model.hpp"
#include "tangentstat/potential.hpp"

#endif  // TANGENTSTAT_TANGENTSTAT_HPP
