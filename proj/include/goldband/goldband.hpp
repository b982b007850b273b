#pragma once

#include "goldband/random.hpp"
#include "goldband/bandit_core.hpp"
#include "goldband/schedule.hpp"
#include "goldband/strategies.hpp"
#include "goldband/accounting.hpp"
#include "goldband/harness.hpp"
#include "goldband/oracle.hpp"
#include "goldband/config.hpp"
#include "goldband/csv.hpp"
