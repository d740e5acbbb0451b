#pragma once

// Umbrella header: the whole library except the command-line front end.

#include "acsplit/analyze.hpp"
#include "acsplit/capability.hpp"
#include "acsplit/decimal.hpp"
#include "acsplit/diagnostic.hpp"
#include "acsplit/dot.hpp"
#include "acsplit/link.hpp"
#include "acsplit/model.hpp"
#include "acsplit/parse.hpp"
#include "acsplit/print.hpp"
#include "acsplit/report.hpp"
#include "acsplit/units.hpp"
#include "acsplit/validate.hpp"
