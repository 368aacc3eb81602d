#pragma once

#include "fsnap/checker.hpp"
#include "fsnap/error.hpp"
#include "fsnap/fcore.hpp"
#include "fsnap/function.hpp"
#include "fsnap/harness.hpp"
#include "fsnap/monitor.hpp"
#include "fsnap/oracle.hpp"
#include "fsnap/schedule.hpp"
#include "fsnap/serialize.hpp"
#include "fsnap/shmem.hpp"
#include "fsnap/timestamp.hpp"
#include "fsnap/types.hpp"
