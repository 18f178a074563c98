#pragma once

#include "gcsim/analysis.hpp"
#include "gcsim/channels.hpp"
#include "gcsim/circuit.hpp"
#include "gcsim/config.hpp"
#include "gcsim/cvsr.hpp"
#include "gcsim/errors.hpp"
#include "gcsim/magnetics.hpp"
#include "gcsim/mna.hpp"
#include "gcsim/newton.hpp"
#include "gcsim/runner.hpp"
#include "gcsim/transient.hpp"
#include "gcsim/waveform.hpp"
