#pragma once

#include "lesionbench/affine.hpp"
#include "lesionbench/detection.hpp"
#include "lesionbench/errors.hpp"
#include "lesionbench/fusion.hpp"
#include "lesionbench/json_io.hpp"
#include "lesionbench/lesions.hpp"
#include "lesionbench/nifti_io.hpp"
#include "lesionbench/overlap.hpp"
#include "lesionbench/phantom.hpp"
#include "lesionbench/pipeline.hpp"
#include "lesionbench/report.hpp"
#include "lesionbench/stats.hpp"
#include "lesionbench/version.hpp"
#include "lesionbench/volume.hpp"
#include "lesionbench/volume_ops.hpp"
