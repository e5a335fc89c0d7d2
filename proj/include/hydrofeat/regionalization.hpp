#pragma once

#include "hydrofeat/regionalization/correlation.hpp"
#include "hydrofeat/regionalization/crossval.hpp"
#include "hydrofeat/regionalization/dataset.hpp"
#include "hydrofeat/regionalization/groups.hpp"
#include "hydrofeat/regionalization/importance.hpp"
#include "hydrofeat/regionalization/report_io.hpp"
#include "hydrofeat/regionalization/summary.hpp"
#include "hydrofeat/regionalization/synthetic.hpp"
