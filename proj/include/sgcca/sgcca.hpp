#pragma once

#include "sgcca/admm.hpp"
#include "sgcca/experiment.hpp"
#include "sgcca/fista.hpp"
#include "sgcca/io.hpp"
#include "sgcca/matrix.hpp"
#include "sgcca/maxvar.hpp"
#include "sgcca/metrics.hpp"
#include "sgcca/random.hpp"
#include "sgcca/synthetic.hpp"
#include "sgcca/view_model.hpp"
