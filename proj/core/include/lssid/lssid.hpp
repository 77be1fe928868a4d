#ifndef LSSID_LSSID_HPP
#define LSSID_LSSID_HPP

#include "lssid/bcd.hpp"
#include "lssid/dp.hpp"
#include "lssid/estimation.hpp"
#include "lssid/integral.hpp"
#include "lssid/io.hpp"
#include "lssid/metrics.hpp"
#include "lssid/rng.hpp"
#include "lssid/simulator.hpp"
#include "lssid/types.hpp"
#include "lssid/version.hpp"

#endif
