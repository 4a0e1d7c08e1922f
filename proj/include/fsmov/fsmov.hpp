#pragma once

#include "analysis.hpp"
#include "bitstream.hpp"
#include "bits.hpp"
#include "error.hpp"
#include "instance.hpp"
#include "kiss.hpp"
#include "mapper.hpp"
#include "reference.hpp"
#include "report.hpp"
#include "sim.hpp"
#include "tailor.hpp"
