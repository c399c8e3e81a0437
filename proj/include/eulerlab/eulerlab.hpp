#ifndef EULERLAB_EULERLAB_HPP
#define EULERLAB_EULERLAB_HPP

#include "config.hpp"
#include "dynamics.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "flow_map.hpp"
#include "grid.hpp"
#include "history_io.hpp"
#include "initial_data.hpp"
#include "norms.hpp"
#include "reports_io.hpp"
#include "spectral.hpp"
#include "stability.hpp"
#include "version.hpp"

#endif
