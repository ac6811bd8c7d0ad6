#pragma once

#include "benchdiag/diagnostics.hpp"
#include "benchdiag/error.hpp"
#include "benchdiag/ingest.hpp"
#include "benchdiag/model.hpp"
#include "benchdiag/reference.hpp"
#include "benchdiag/report.hpp"
