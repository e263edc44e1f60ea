#pragma once

#include "handuse/chains.hpp"
#include "handuse/csv_io.hpp"
#include "handuse/error.hpp"
#include "handuse/eval.hpp"
#include "handuse/features.hpp"
#include "handuse/filter.hpp"
#include "handuse/imu.hpp"
#include "handuse/pipeline.hpp"
#include "handuse/report.hpp"
#include "handuse/svm.hpp"
#include "handuse/sweep.hpp"
#include "handuse/synth.hpp"
