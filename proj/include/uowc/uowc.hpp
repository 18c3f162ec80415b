#pragma once

// Library umbrella; the CLI layer lives under uowc/app/.
#include "uowc/channel.hpp"
#include "uowc/config.hpp"
#include "uowc/energy.hpp"
#include "uowc/errors.hpp"
#include "uowc/geometry.hpp"
#include "uowc/mc_oracle.hpp"
#include "uowc/numerics.hpp"
#include "uowc/report.hpp"
#include "uowc/rx_power.hpp"
#include "uowc/sipm.hpp"
